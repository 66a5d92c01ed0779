from pathlib import Path

import pytest

UNITS = "units=length:steps;effort:proposals;temperature:absolute;energy:objective"


def _write(path: Path, schema: str, header: str, rows: list[str]) -> Path:
    lines = [f"# schema={schema} {UNITS}", header, *rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def results_csv(tmp_path):
    header = (
        "method,n,length,replicas,m_q,ensemble,instances,repeats,trials,"
        "successes_best,successes_final,p_s,p_s_halfwidth,repeats_needed,"
        "effort,total_proposals"
    )
    rows = [
        "sa,10,10,1,0,tune,30,50,1500,150,120,0.1,0.015,43.7,437.0,15000",
        "sa,10,30,1,0,tune,30,50,1500,450,400,0.3,0.023,12.9,387.0,45000",
        "sa,10,100,1,0,tune,30,50,1500,720,700,0.48,0.025,7.04,704.0,150000",
        "sa,10,300,1,0,tune,30,50,1500,840,800,0.56,0.025,5.6,1680.0,450000",
        "qesa,10,10,1,0,tune,30,50,1500,75,70,0.05,0.011,89.8,898.0,15000",
        "qesa,10,30,1,0,tune,30,50,1500,525,510,0.35,0.024,10.7,321.0,45000",
        "qesa,10,100,1,0,tune,30,50,1500,1275,1250,0.85,0.018,2.43,243.0,150000",
        "qesa,10,300,1,0,tune,30,50,1500,1485,1480,0.99,0.005,1.0,300.0,450000",
    ]
    return _write(tmp_path / "results.csv", "qeopt-results/1", header, rows)


@pytest.fixture
def fits_csv(tmp_path):
    header = (
        "method,n,replicas,m_q,l_star,fit_a,fit_b,fit_c,subset_size,"
        "subset_lengths,vertex_from_fit"
    )
    rows = [
        "sa,10,1,0,43.0,120.0,-902.9,2000.0,3,10 30 100,1",
        "qesa,10,1,0,151.0,80.0,-803.0,2300.0,3,30 100 300,1",
    ]
    return _write(tmp_path / "fits.csv", "qeopt-fits/1", header, rows)


@pytest.fixture
def scaling_csv(tmp_path):
    header = (
        "method,n,replicas,m_q,l_star,l_eval,p_s,p_s_halfwidth,repeats_needed,"
        "effort,effort_lo,effort_hi,instances,repeats"
    )
    rows = []
    for m_q in range(5):
        method = "pt" if m_q == 0 else "qept"
        for n in (5, 6, 7):
            base = 100.0 * n - 15.0 * m_q * (n - 4)
            rows.append(
                f"{method},{n},4,{m_q},{10.0 + n},{10 + n},0.6,0.03,8.0,"
                f"{base},{base * 0.9},{base * 1.1},30,100"
            )
    return _write(tmp_path / "scaling.csv", "qeopt-scaling/1", header, rows)


@pytest.fixture
def gaps_csv(tmp_path):
    header = (
        "n,kernel,temperature,instances,delta_mean,delta_stderr,delta_min,"
        "delta_max,tau_lower_mean,tau_upper_mean"
    )
    rows = []
    for kernel, offset in (("local", 0.0), ("quantum", 0.02)):
        for t, d in ((10.0, 0.9), (1.0, 0.3), (0.3, 0.05), (0.1, 0.004)):
            rows.append(
                f"6,{kernel},{t},20,{d + offset},{d / 10},{d / 2},"
                f"{min(1.0, d * 1.5)},{1.0 / d},{30.0 / d}"
            )
    return _write(tmp_path / "gaps.csv", "qeopt-gaps/1", header, rows)

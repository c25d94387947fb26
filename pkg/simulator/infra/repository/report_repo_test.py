import pytest

from shapes.domain.mapping import MappingMode
from simulator.domain.report import JobRecord, JobStatus, RunReport
from simulator.infra.repository.report_repo import FileReportRepository
from workload.domain.job import Shape


@pytest.fixture
def report():
    return RunReport(
        policy="RFold",
        spec="64x4^3",
        seed=7,
        total_xpus=4096,
        records=[
            JobRecord(
                "job-00001",
                Shape(4, 8, 2),
                0.0,
                12.5,
                JobStatus.COMPLETED,
                0.0,
                12.5,
                MappingMode.RING_COMPLETE,
                1,
                48,
                "reflection d1/2 d2x2",
            ),
            JobRecord("job-00002", Shape(1, 1, 4096), 1.0, 3.0, JobStatus.REJECTED),
        ],
        samples=[(0.0, 0.015625), (1.0, 0.015625), (12.5, 0.0)],
        gen_config={"job_count": 2},
    )


def test_json_report_reads_back(report, tmp_path):
    repo = FileReportRepository()
    path = tmp_path / "out" / "report.json"

    repo.save(report, path)

    assert repo.load(path) == report


def test_job_csv_rows(report, tmp_path):
    path = tmp_path / "jobs.csv"

    FileReportRepository().save_jobs(report, path)

    assert path.read_text().splitlines() == [
        "id,status,arrival_s,start_s,finish_s,mode,cubes_used,circuits_used",
        "job-00001,completed,0.0,0.0,12.5,ring_complete,1,48",
        "job-00002,rejected,1.0,,,,0,0",
    ]

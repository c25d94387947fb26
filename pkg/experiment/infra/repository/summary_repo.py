import csv
from pathlib import Path

from experiment.domain.cell_result import CellResult
from experiment.domain.repository.summary_repo import ISummaryRepository

HEADER = ["cell", "policy", "cube", "metric", "value"]


def _metrics(result: CellResult) -> dict[str, list[tuple[str, float]]]:
    summary = result.summary
    return {
        "jcr.csv": [("jcr", summary.mean_jcr)],
        "jct.csv": [(f"p{q}", value) for q, value in sorted(summary.jct.items())],
        "utilization.csv": [
            ("mean", summary.mean_utilization),
            *((f"p{q}", value) for q, value in summary.utilization),
        ],
    }


class CsvSummaryRepository(ISummaryRepository):
    def save_tables(self, results: list[CellResult], out_dir: Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        rows: dict[str, list[list[str]]] = {"jcr.csv": [], "jct.csv": [], "utilization.csv": []}
        for result in results:
            if result.failed:
                continue
            for name, metrics in _metrics(result).items():
                for metric, value in metrics:
                    rows[name].append([result.label, result.policy, result.cube, metric, f"{value:.6f}"])

        paths = []
        for name, table in rows.items():
            path = out_dir / name
            with path.open("w", encoding="utf-8", newline="") as sink:
                writer = csv.writer(sink, lineterminator="\n")
                writer.writerow(HEADER)
                writer.writerows(table)
            paths.append(path)
        return paths

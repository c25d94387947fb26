from pathlib import Path

from experiment.domain.cell_result import CellResult
from experiment.domain.repository.summary_repo import IChartRepository

WIDTH, HEIGHT, MARGIN = 720, 400, 56
COLORS = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]


def _frame(title: str, body: list[str], y_label: str, y_max: float) -> str:
    plot_h = HEIGHT - 2 * MARGIN
    ticks = []
    for i in range(5):
        value = y_max * i / 4
        y = HEIGHT - MARGIN - plot_h * i / 4
        ticks.append(f'<line x1="{MARGIN - 4}" y1="{y:.1f}" x2="{WIDTH - MARGIN}" y2="{y:.1f}" stroke="#ddd"/>')
        ticks.append(
            f'<text x="{MARGIN - 8}" y="{y + 4:.1f}" font-size="11" text-anchor="end">{value:.3g}</text>'
        )
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.1f}" y="24" font-size="15" text-anchor="middle">{title}</text>',
            f'<text x="14" y="{HEIGHT / 2:.1f}" font-size="12" transform="rotate(-90 14 {HEIGHT / 2:.1f})" '
            f'text-anchor="middle">{y_label}</text>',
            *ticks,
            f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="#333"/>',
            f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="#333"/>',
            *body,
            "</svg>",
            "",
        ]
    )


def _legend(labels: list[str]) -> list[str]:
    items = []
    for i, label in enumerate(labels):
        y = MARGIN + 16 * i
        color = COLORS[i % len(COLORS)]
        items.append(f'<rect x="{WIDTH - MARGIN - 150}" y="{y - 9}" width="10" height="10" fill="{color}"/>')
        items.append(f'<text x="{WIDTH - MARGIN - 134}" y="{y}" font-size="11">{label}</text>')
    return items


def jct_bar_chart(results: list[CellResult]) -> str:
    """Grouped bars of p50/p90/p99 JCT per cell."""
    results = [r for r in results if not r.failed]
    percentiles = sorted({q for r in results for q in r.summary.jct})
    y_max = max((v for r in results for v in r.summary.jct.values()), default=1.0) or 1.0
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
    group_w = plot_w / max(1, len(percentiles))
    bar_w = group_w * 0.8 / max(1, len(results))

    body = []
    for g, q in enumerate(percentiles):
        x0 = MARGIN + g * group_w + group_w * 0.1
        body.append(
            f'<text x="{MARGIN + (g + 0.5) * group_w:.1f}" y="{HEIGHT - MARGIN + 18}" font-size="12" '
            f'text-anchor="middle">p{q}</text>'
        )
        for i, result in enumerate(results):
            value = result.summary.jct.get(q, 0.0)
            h = plot_h * value / y_max
            body.append(
                f'<rect x="{x0 + i * bar_w:.1f}" y="{HEIGHT - MARGIN - h:.1f}" width="{bar_w:.1f}" '
                f'height="{h:.1f}" fill="{COLORS[i % len(COLORS)]}"/>'
            )
    body += _legend([r.label for r in results])
    return _frame("Job completion time", body, "seconds", y_max)


def utilization_cdf_chart(results: list[CellResult]) -> str:
    """One polyline per cell: utilization level (x) against percentile (y)."""
    results = [r for r in results if not r.failed]
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
    body = []
    for i, result in enumerate(results):
        points = " ".join(
            f"{MARGIN + plot_w * level:.1f},{HEIGHT - MARGIN - plot_h * q / 100:.1f}"
            for q, level in result.summary.utilization
        )
        body.append(
            f'<polyline points="{points}" fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="2"/>'
        )
    for i in range(5):
        x = MARGIN + plot_w * i / 4
        body.append(
            f'<text x="{x:.1f}" y="{HEIGHT - MARGIN + 18}" font-size="11" text-anchor="middle">{i / 4:.2f}</text>'
        )
    body += _legend([r.label for r in results])
    return _frame("Cluster utilization CDF", body, "CDF (%)", 100)


class SvgChartRepository(IChartRepository):
    def save_charts(self, results: list[CellResult], out_dir: Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        charts = {
            "jct.svg": jct_bar_chart(results),
            "utilization_cdf.svg": utilization_cdf_chart(results),
        }
        paths = []
        for name, svg in charts.items():
            path = out_dir / name
            path.write_text(svg, encoding="utf-8")
            paths.append(path)
        return paths

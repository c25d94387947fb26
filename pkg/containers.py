from dependency_injector import containers, providers

from config import get_settings
from experiment.application.sweep_service import SweepService
from experiment.infra.repository.summary_repo import CsvSummaryRepository
from experiment.infra.repository.svg_chart import SvgChartRepository
from simulator.application.simulator_service import SimulatorService
from simulator.infra.repository.report_repo import FileReportRepository
from workload.application.trace_service import TraceService
from workload.infra.repository.trace_repo import JsonlTraceRepository


class Container(containers.DeclarativeContainer):
    wiring_config = containers.WiringConfiguration(
        packages=[
            "experiment.interface",
        ],
    )

    settings = providers.Singleton(get_settings)

    trace_repo = providers.Factory(JsonlTraceRepository)
    trace_service = providers.Factory(TraceService, trace_repo=trace_repo)

    report_repo = providers.Factory(FileReportRepository)
    simulator_service = providers.Factory(SimulatorService, settings=settings)

    summary_repo = providers.Factory(CsvSummaryRepository)
    chart_repo = providers.Factory(SvgChartRepository)
    sweep_service = providers.Factory(
        SweepService,
        trace_service=trace_service,
        summary_repo=summary_repo,
        chart_repo=chart_repo,
        settings=settings,
    )

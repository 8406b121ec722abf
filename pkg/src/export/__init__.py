"""Point-cloud files and reconstruction reports"""

from .point_cloud_writer import format_point_cloud, write_point_cloud, patch_to_cloud
from .report import ReconstructionReport, ReconstructionReportExporter

__all__ = [
    "format_point_cloud",
    "write_point_cloud",
    "patch_to_cloud",
    "ReconstructionReport",
    "ReconstructionReportExporter",
]

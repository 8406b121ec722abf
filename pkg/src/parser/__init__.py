"""Point-cloud file parsing"""

from .point_cloud_parser import PointCloudParser, read_point_cloud

__all__ = [
    "PointCloudParser",
    "read_point_cloud",
]

# file_processor/file_processor.py
import os

from file_processor.label_map_processor import LabelMapProcessor
from file_processor.raster_processor import RasterProcessor
from utils.errors import ArgumentError


class FileProcessor:
    """Loads raster inputs by extension: QRAS scenes and PGM label maps."""

    def __init__(self):
        self.processors = {
            '.qras': RasterProcessor(),
            '.pgm': LabelMapProcessor(),
        }

    def process(self, file_path: str):
        ext = os.path.splitext(file_path)[1].lower()
        if ext not in self.processors:
            raise ArgumentError(f"unsupported file type '{ext}' ({file_path})")
        return self.processors[ext].process(file_path)

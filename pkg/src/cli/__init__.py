"""
Command-line front-end and problem-spec documents.
"""

from .spec_document import load_document, parse_document, to_document, write_report, write_solution_csv

__all__ = [
    'load_document',
    'parse_document',
    'to_document',
    'write_report',
    'write_solution_csv',
]

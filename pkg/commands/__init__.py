"""
Command modules for JetKit
"""
from .system_commands import SystemGroup
from .cohomology_commands import CohomologyGroup
from .sequence_commands import SequenceGroup
from .catalog_commands import CatalogGroup
from .check_commands import CheckGroup

__all__ = [
    'SystemGroup',
    'CohomologyGroup',
    'SequenceGroup',
    'CatalogGroup',
    'CheckGroup',
]

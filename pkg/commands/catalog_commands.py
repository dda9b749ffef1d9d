"""
Catalog command group for built-in systems
"""
from typing import Optional

from core.catalog import CATALOG, catalog_entry
from commands.base import CommandContext, CommandGroup, Report, argument, command
from commands.dsl import document_from_system, print_document


def catalog_document(name: str) -> str:
    """The DSL text of a built-in system"""
    entry = catalog_entry(name)
    return print_document(document_from_system(entry.build(), name, unknown_prefix=entry.unknown_prefix))


class CatalogGroup(CommandGroup):
    """Built-in systems"""

    name = "catalog"
    description = "List or print built-in systems"

    @command("catalog", "List built-in systems, or print one as a document", reads_system=False)
    @argument("system", nargs="?", default=None, help="catalog name")
    def catalog(self, ctx: CommandContext, args) -> Report:
        name: Optional[str] = args.system
        if name is None:
            return Report({"systems": [f"{entry.name}: {entry.description}" for entry in CATALOG.values()]})
        text = catalog_document(name)
        return Report({"name": name, "document": text}, document=text)

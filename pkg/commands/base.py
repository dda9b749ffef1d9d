"""
Command group plumbing shared by every subcommand
"""
import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, TextIO

from commands.dsl import SystemDocument, document_from_system, parse, print_document
from config import EngineSettings
from core.system import LinearJetSystem


@dataclass
class Report:
    """
    A command result

    ``payload`` feeds both the text and the JSON rendering. When ``document`` is
    set, text mode prints the DSL document instead so the output can be piped
    into the next command. ``ok`` False maps to the check-failure exit code.
    """
    payload: dict
    document: Optional[str] = None
    ok: bool = True


@dataclass
class CommandContext:
    settings: EngineSettings
    as_json: bool = False
    source: Optional[str] = None
    stdin: TextIO = field(default_factory=lambda: sys.stdin)
    _document: Optional[SystemDocument] = field(default=None, init=False, repr=False)

    def read_text(self) -> str:
        if self.source and self.source != "-":
            with open(self.source, encoding="utf-8") as handle:
                return handle.read()
        return self.stdin.read()

    def document(self) -> SystemDocument:
        if self._document is None:
            self._document = parse(self.read_text())
        return self._document

    def system(self) -> LinearJetSystem:
        return self.document().to_system()

    def render(self, S: LinearJetSystem, name: Optional[str] = None) -> str:
        """Print ``S`` with the names of the input document"""
        doc = self.document()
        unknowns = doc.unknowns if S.m == doc.m else None
        variables = doc.variables if S.n == doc.n else None
        return print_document(document_from_system(S, name, unknowns=unknowns, variables=variables))


@dataclass(frozen=True)
class CommandSpec:
    name: str
    description: str
    reads_system: bool
    arguments: tuple


def command(name: str, description: str, reads_system: bool = True):
    """Mark a group method as a subcommand"""
    def wrap(func: Callable) -> Callable:
        pending = getattr(func, "_arguments", ())
        func._command = CommandSpec(name, description, reads_system, tuple(reversed(pending)))
        return func
    return wrap


def argument(*flags: str, **kwargs: Any):
    """Attach an argparse argument to a subcommand; stack below ``@command``"""
    def wrap(func: Callable) -> Callable:
        func._arguments = getattr(func, "_arguments", ()) + ((flags, kwargs),)
        return func
    return wrap


class CommandGroup:
    """A set of subcommands registered on the top-level parser"""

    name = ""
    description = ""

    def commands(self) -> list[tuple[CommandSpec, Callable]]:
        found = []
        for attr in vars(type(self)).values():
            spec = getattr(attr, "_command", None)
            if spec is not None:
                found.append((spec, getattr(self, attr.__name__)))
        return found

    def register(self, subparsers: argparse._SubParsersAction, parents: Sequence[argparse.ArgumentParser] = ()) -> None:
        for spec, handler in self.commands():
            parser = subparsers.add_parser(spec.name, help=spec.description, description=spec.description,
                                           parents=list(parents))
            if spec.reads_system:
                parser.add_argument("file", nargs="?", default="-",
                                    help="system document (default: read stdin)")
            for flags, kwargs in spec.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=handler, group=self.name)

"""``ontohub`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, views
from .config import ServiceConfig, load_config
from .errors import InvalidArgument, OntohubError
from .hub import Hub
from .rdf import SyntaxFormat
from .rdf.namespaces import WELL_KNOWN_PREFIXES, compact
from .validator import enumerate_graphs, stats, validate

DUMP_FORMATS = {"ttl": SyntaxFormat.TURTLE, "nt": SyntaxFormat.NTRIPLES, "rdfxml": SyntaxFormat.RDFXML, "rdfjson": SyntaxFormat.RDFJSON}
READ_ONLY = {"list", "versions", "dump", "tree", "listview", "vowl", "search", "diff", "graphs"}


def _emit_json(data) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _columns(rows: list[tuple[str, ...]]) -> str:
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def cmd_register(hub: Hub, args) -> int:
    try:
        doc = Path(args.file).read_bytes() if args.file != "-" else sys.stdin.buffer.read()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {args.file}: {exc.strerror}") from None
    fmt = args.format or ("ntriples" if args.file.endswith(".nt") else "turtle")
    record = hub.registry.register(
        doc,
        fmt,
        prefix=args.prefix,
        version_info=args.version,
        issued=args.issued,
        title=args.title,
        description=args.description,
        rights=args.rights,
        license=args.license,
        contributor=args.contributor,
        catalogue=args.catalogue,
        source_graph=args.source_graph,
        base=args.base,
    )
    _emit_json(record.to_dict())
    return 0


def cmd_list(hub: Hub, args) -> int:
    records = hub.registry.list_latest()
    if args.json:
        _emit_json([r.to_dict() for r in records])
    else:
        rows = [("prefix", "version", "issued", "title")]
        rows += [(r.prefix, r.version_info, r.issued.strftime("%Y-%m-%d"), r.title) for r in records]
        print(_columns(rows))
    return 0


def cmd_versions(hub: Hub, args) -> int:
    records = hub.registry.versions(args.prefix)
    if args.json:
        _emit_json([r.to_dict() for r in records])
    else:
        rows = [("version", "issued", "status", "record")]
        rows += [
            (r.version_info, r.issued.strftime("%Y-%m-%d %H:%M:%S"), "latest" if r.is_latest else "archived", r.record_iri)
            for r in records
        ]
        print(_columns(rows))
    return 0


def cmd_dump(hub: Hub, args) -> int:
    sys.stdout.buffer.write(hub.registry.dump(args.prefix, args.version, DUMP_FORMATS[args.format]))
    sys.stdout.flush()
    return 0


def cmd_tree(hub: Hub, args) -> int:
    g = hub.registry.graph(args.prefix, args.version)
    forest = views.class_tree(g)
    if args.json:
        _emit_json([node.to_dict() for node in forest])
    else:
        sys.stdout.write(views.tree_text(forest, g.prefixes))
    return 0


def cmd_listview(hub: Hub, args) -> int:
    doc = views.list_view(hub.registry.graph(args.prefix, args.version))
    body = doc.to_html(hub.registry.latest(args.prefix).title or args.prefix) if args.html else doc.to_json()
    sys.stdout.buffer.write(body)
    sys.stdout.flush()
    return 0


def cmd_vowl(hub: Hub, args) -> int:
    sys.stdout.buffer.write(views.vowl_json(hub.registry.graph(args.prefix, args.version)))
    sys.stdout.flush()
    return 0


def cmd_search(hub: Hub, args) -> int:
    hits = hub.registry.search(args.query, args.facet or None)
    if args.json:
        _emit_json([h.to_dict() for h in hits])
        return 0
    rows = [("ontology", "term", "kind", "field", "match")]
    rows += [(h.ontology_prefix, compact(h.term_iri, WELL_KNOWN_PREFIXES), h.term_kind, h.matched_field, h.snippet) for h in hits]
    print(_columns(rows))
    return 0


def cmd_diff(hub: Hub, args) -> int:
    diff = hub.registry.diff(args.prefix, args.version_a, args.version_b)
    if args.json:
        _emit_json(diff.to_dict())
        return 0
    for line in sorted(t.n3() for t in diff.removed):
        print(f"- {line}")
    for line in sorted(t.n3() for t in diff.added):
        print(f"+ {line}")
    return 0


def cmd_rollback(hub: Hub, args) -> int:
    _emit_json(hub.registry.rollback(args.prefix, args.version).to_dict())
    return 0


def cmd_graphs(hub: Hub, args) -> int:
    for name in sorted(enumerate_graphs(hub.session(args.endpoint, timeout=args.timeout))):
        print(name)
    return 0


def cmd_stats(hub: Hub, args) -> int:
    report = stats(hub.session(args.endpoint, args.graph, args.timeout))
    print(report.to_json() if args.json else report.to_text(), end="\n" if args.json else "")
    return 0


def cmd_validate(hub: Hub, args) -> int:
    report = validate(hub.session(args.endpoint, args.graph, args.timeout), args.ontology, hub.registry)
    if args.json:
        print(report.to_json())
    else:
        record = hub.registry.resolve(args.ontology)
        sys.stdout.write(report.to_text(hub.registry.graph(record.prefix).prefixes))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontohub", description="Ontology registry, views and dataset validation.")
    parser.add_argument("--version", action="version", version=f"ontohub {__version__}")
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--store", help="store directory (overrides store_root)")
    parser.add_argument("--archive", help="archive directory (overrides archive_root)")
    parser.add_argument("--base-iri", help="base IRI for record and graph names")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("register", help="register a new ontology version")
    p.add_argument("file", help="ontology document, or - for standard input")
    p.add_argument("--prefix", required=True)
    p.add_argument("--version", required=True)
    p.add_argument("--issued", required=True, help="YYYY-MM-DD[ HH:MM:SS]")
    p.add_argument("--title", default="")
    p.add_argument("--description", default="")
    p.add_argument("--rights", default="")
    p.add_argument("--license")
    p.add_argument("--contributor")
    p.add_argument("--catalogue", action="append", default=[], help="catalogue keyword (repeatable)")
    p.add_argument("--format", choices=["turtle", "ntriples", "ttl", "nt"])
    p.add_argument("--source-graph", help="named graph to hold the ontology")
    p.add_argument("--base", help="base IRI for relative references")
    p.set_defaults(run=cmd_register)

    p = sub.add_parser("list", help="latest version of every ontology")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_list)

    p = sub.add_parser("versions", help="all versions of one ontology")
    p.add_argument("prefix")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_versions)

    p = sub.add_parser("dump", help="serialize an ontology version")
    p.add_argument("prefix")
    p.add_argument("--version")
    p.add_argument("--format", choices=sorted(DUMP_FORMATS), default="ttl")
    p.set_defaults(run=cmd_dump)

    for name, run, help_text in (
        ("tree", cmd_tree, "class hierarchy"),
        ("listview", cmd_listview, "single-page vocabulary listing"),
        ("vowl", cmd_vowl, "graph-view JSON"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("prefix")
        p.add_argument("--version")
        if name == "tree":
            p.add_argument("--json", action="store_true")
        if name == "listview":
            p.add_argument("--html", action="store_true", help="HTML instead of JSON")
        p.set_defaults(run=run)

    p = sub.add_parser("search", help="search latest ontology versions")
    p.add_argument("query")
    p.add_argument("--facet", action="append", help="restrict to a field (repeatable)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_search)

    p = sub.add_parser("diff", help="triples added and removed between two versions")
    p.add_argument("prefix")
    p.add_argument("version_a")
    p.add_argument("version_b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_diff)

    p = sub.add_parser("rollback", help="make an archived version the latest again")
    p.add_argument("prefix")
    p.add_argument("version")
    p.set_defaults(run=cmd_rollback)

    p = sub.add_parser("graphs", help="list the named graphs at a SPARQL endpoint")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--timeout", type=float)
    p.set_defaults(run=cmd_graphs)

    for name, run, help_text in (
        ("stats", cmd_stats, "usage statistics over target graphs"),
        ("validate", cmd_validate, "check dataset terms against an ontology"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--endpoint", required=True, help="SPARQL endpoint URL, or local: for the embedded store")
        p.add_argument("--graph", action="append", required=True, help="target graph IRI (repeatable)")
        if name == "validate":
            p.add_argument("--ontology", required=True, help="prefix, record IRI or graph IRI")
        p.add_argument("--timeout", type=float)
        p.add_argument("--json", action="store_true")
        p.set_defaults(run=run)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.set_defaults(run=None)
    return parser


def _config(args) -> ServiceConfig:
    config = load_config(args.config)
    overrides = {}
    if args.store:
        overrides["store_root"] = Path(args.store)
    if args.archive:
        overrides["archive_root"] = Path(args.archive)
    if args.base_iri:
        overrides["base_iri"] = args.base_iri.rstrip("/")
    return ServiceConfig(**{**config.__dict__, **overrides}) if overrides else config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        if args.command == "serve":
            from .service import serve

            serve(config)
            return 0
        with Hub(config, readonly=args.command in READ_ONLY) as hub:
            return args.run(hub, args)
    except OntohubError as exc:
        print(f"ontohub: error [{exc.code}]: {exc.message}", file=sys.stderr)
        return exc.exit_status
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())

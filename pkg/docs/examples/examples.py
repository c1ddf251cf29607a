#!/usr/bin/env python3
"""
Walkthrough of the KMS trace classifier on the bundled model files

Run from the project root:

    python docs/examples/examples.py
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(project_root))

from main import CommandFactory  # noqa: E402
from utils.output_formatter import OutputFormat, format_output  # noqa: E402

HERE = Path(__file__).parent


def model(name: str) -> str:
    return str(HERE / name)


def show(title: str, command: str, params: dict) -> dict:
    print(f"\n📝 {title}")
    print(f"   🎯 Command: {command}")
    result = CommandFactory.create_command(command, params).run()
    print("   " + format_output(result, OutputFormat.TEXT).splitlines()[0])
    return result


def demonstrate_subinvariance():
    """Clique inequalities on a few systems"""

    print("🔍 Subinvariance checks")
    print("=" * 50)

    result = show("Constructed counterexample fails only at the clique I",
                  "check", {"model": model("optimal.json"), "trace": "mu", "beta": 1.0})
    failing = result["data"].get("subinvariance", {}).get("failing_subsets")
    print(f"   📋 Failing subsets: {failing}")

    show("Free monoid on two letters, N = 2",
         "check", {"model": model("free_pair.json"), "beta": 2.0})
    show("Path graph a - b - c with the general subset search up to length 2",
         "check", {"model": model("square.json"), "beta": 2.0, "general_length": 2})
    show("k-graph with two commuting colours",
         "check", {"model": model("kgraph.json"), "beta": 2.0})


def demonstrate_wold():
    """Finite/infinite split of subinvariant traces"""

    print("\n🧬 Wold decompositions")
    print("=" * 50)

    for beta in (1.5, 1.0):
        result = show(f"Free monoid at beta = {beta}",
                      "wold", {"model": model("free_pair.json"), "beta": beta})
        wold = result["data"].get("wold") or {}
        print(f"   📋 Type: {wold.get('type')}")

    result = show("Diagonal transfer matrix mixes both parts",
                  "wold", {"model": model("mixed.json"), "beta": 1.0})
    print(f"   📋 Type: {(result['data'].get('wold') or {}).get('type')}")

    result = show("Product decomposition on the abelian pair",
                  "decompose", {"model": model("abelian.json"), "trace": "skewed", "beta": 2.0})
    components = (result["data"].get("decomposition") or {}).get("components", [])
    for component in components:
        print(f"   📋 F = {component['F']}: mass {component['mass']:.6g}")


def demonstrate_critical():
    """Critical temperatures and witnesses"""

    print("\n🌡️  Critical temperatures")
    print("=" * 50)

    for name in ("free_pair.json", "abelian.json", "kgraph.json", "local_maps.json", "square.json"):
        result = show(name, "critical", {"model": model(name)})
        critical = result["data"].get("critical") or {}
        print(f"   📋 beta_c = {critical.get('beta_c')} ({critical.get('method')})")
        print(f"   📋 Witness: {result['data'].get('witness')}")


def demonstrate_atoms():
    """Atom weights of the measure on the path space"""

    print("\n⚛️  Atom weights")
    print("=" * 50)

    result = show("Free monoid with N = 2 at beta = 2",
                  "atoms", {"model": model("free_pair.json"), "beta": 2.0, "length": 3})
    atoms = result["data"].get("atoms") or {}
    for element, weight in list(atoms.get("weights", {}).items())[:7]:
        print(f"   📋 {element}: {weight:.6g}")


def main():
    demonstrate_subinvariance()
    demonstrate_wold()
    demonstrate_critical()
    demonstrate_atoms()

    print("\n" + "=" * 50)
    print("💡 Usage Tips:")
    print("1. Every demo above maps to a CLI call, e.g. 'python main.py critical --model docs/examples/kgraph.json'")
    print("2. Pick a stored trace with --trace or pass one with --trace-inline 0.5,0.5")
    print("3. Sweep a beta grid with 'python main.py sweep --model ... --beta-range 0.5:3:11'")
    print("4. Tune tolerances in .env ('python main.py setup' writes a template)")


if __name__ == "__main__":
    main()

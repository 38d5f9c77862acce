#!/usr/bin/env python3
"""Rebuild the SNDlib native-format fixtures under data/sndlib/.

The upstream SNDlib download server is not reachable from every build host,
so the fixtures are regenerated from the topology snapshot shipped with the
`topohub` package (pip install topohub). Node names, coordinates, links and
demand values come from that snapshot unchanged. Link module costs are not
part of the snapshot; they are synthesized from the great-circle link length
so that every link carries a deterministic, positive module price:

    module 1: capacity 40,  cost 100 + round(length_km)
    module 2: capacity 160, cost 3 * (module 1 cost)

Usage: make_sndlib_fixtures.py [--out DIR] [NAME ...]
"""

import argparse
import json
import math
import pathlib

import topohub

DEFAULT_NAMES = ["germany50", "polska", "pdh"]


def haversine_km(a, b):
    lon1, lat1 = map(math.radians, a)
    lon2, lat2 = map(math.radians, b)
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def render(name, topo):
    nodes = {n["id"]: n for n in topo["nodes"]}
    out = []
    out.append("?SNDlib native format; type: network; version: 1.0")
    out.append(f"# network {name}")
    out.append("# regenerated from the topohub SNDlib snapshot; module costs synthesized")
    out.append("")
    out.append("META (")
    out.append("  granularity = 6month")
    out.append("  time = ")
    out.append("  unit = MBPS")
    out.append("  origin = topohub snapshot")
    out.append(")")
    out.append("")
    out.append("# <node_id> [(<longitude>, <latitude>)]")
    out.append("NODES (")
    for n in topo["nodes"]:
        lon, lat = n["pos"]
        out.append(f"  {n['name']} ( {lon:.2f} {lat:.2f} )")
    out.append(")")
    out.append("")
    out.append("# <link_id> ( <source> <target> ) <pre_installed_capacity> "
               "<pre_installed_capacity_cost> <routing_cost> <setup_cost> "
               "( {<module_capacity> <module_cost>}* )")
    out.append("LINKS (")
    for i, e in enumerate(topo["edges"], start=1):
        a, b = nodes[e["source"]], nodes[e["target"]]
        base = 100 + round(haversine_km(a["pos"], b["pos"]))
        out.append(f"  L{i} ( {a['name']} {b['name']} ) 0.00 0.00 0.00 0.00 "
                   f"( 40.00 {base:.2f} 160.00 {3 * base:.2f} )")
    out.append(")")
    out.append("")
    out.append("# <demand_id> ( <source> <target> ) <routing_unit> <demand_value> "
               "<max_path_length>")
    out.append("DEMANDS (")
    for src, row in topo["graph"]["demands"].items():
        for dst, value in row.items():
            a, b = nodes[int(src)]["name"], nodes[int(dst)]["name"]
            out.append(f"  {a}_{b} ( {a} {b} ) 1 {value:.2f} UNLIMITED")
    out.append(")")
    out.append("")
    out.append("ADMISSIBLE_PATHS (")
    out.append(")")
    return "\n".join(out) + "\n"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                             / "data" / "sndlib"))
    parser.add_argument("names", nargs="*", default=DEFAULT_NAMES)
    args = parser.parse_args()
    root = pathlib.Path(topohub.__file__).resolve().parent / "data" / "sndlib"
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        topo = json.loads((root / f"{name}.json").read_text())
        (out_dir / f"{name}.txt").write_text(render(name, topo))
        print(f"wrote {out_dir / (name + '.txt')}")


if __name__ == "__main__":
    main()

"""Resumable enumeration of the Markoff tree to a JSON-lines file.

While running, records are appended (unsorted) to ``<out>.partial`` and the
depth-first stack is saved to the checkpoint file every ``interval``
records.  The checkpoint stores how many lines of the partial file it
vouches for; on resume the partial file is cut back to that many lines, so
records written after the last checkpoint are produced again exactly once.
The final file is sorted, hence identical to an uninterrupted run.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from markoff.triples import ROOT, TreeNode, enumerate_nodes

SCHEMA_VERSION = 1
DEFAULT_INTERVAL = 1000


class CheckpointError(ValueError):
    """Malformed or mismatched checkpoint file."""


@dataclass
class Checkpoint:
    c_bound: int
    frontier: list[TreeNode]
    emitted_count: int
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": self.schema_version,
                "c_bound": str(self.c_bound),
                "emitted_count": str(self.emitted_count),
                "frontier": [n.to_record() for n in self.frontier],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> Checkpoint:
        try:
            obj = json.loads(text)
            if obj["schema_version"] != SCHEMA_VERSION:
                raise CheckpointError(f"unsupported schema_version {obj['schema_version']!r}")
            return cls(
                c_bound=int(obj["c_bound"]),
                frontier=[TreeNode.from_record(r) for r in obj["frontier"]],
                emitted_count=int(obj["emitted_count"]),
            )
        except CheckpointError:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise CheckpointError(f"malformed checkpoint: {err}") from err


def write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def output_order(node: TreeNode) -> tuple[int, int, int]:
    t = node.triple
    return (t.c, t.b, t.a)


def render(nodes: list[TreeNode]) -> str:
    return "".join(n.to_json() + "\n" for n in sorted(nodes, key=output_order))


def _read_records(path: Path, limit: int) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        complete = [ln for ln in fh.read().splitlines(keepends=True) if ln.endswith("\n")]
    if len(complete) < limit:
        raise CheckpointError(f"{path} holds {len(complete)} records, checkpoint expects {limit}")
    return complete[:limit]


def run_enumeration(
    c_bound: int,
    out_path: Path,
    checkpoint_path: Path | None = None,
    interval: int = DEFAULT_INTERVAL,
    workers: int = 1,
    halt_after: int | None = None,
) -> int:
    """Write every tree node with max <= c_bound to ``out_path``; return the count.

    ``halt_after`` kills the process (no cleanup) after that many records;
    it exists to test resumption.
    """
    if c_bound < 1:
        raise ValueError("max_c must be >= 1")
    out_path = Path(out_path)
    if checkpoint_path is None:
        nodes = enumerate_nodes(c_bound, workers)
        write_atomic(out_path, render(nodes))
        return len(nodes)

    checkpoint_path = Path(checkpoint_path)
    partial = out_path.with_name(out_path.name + ".partial")
    if checkpoint_path.exists():
        ckpt = Checkpoint.from_json(checkpoint_path.read_text(encoding="utf-8"))
        if ckpt.c_bound != c_bound:
            raise CheckpointError(f"checkpoint is for max_c={ckpt.c_bound}, not {c_bound}")
        if not partial.exists():
            raise CheckpointError(f"checkpoint {checkpoint_path} has no partial output {partial}")
        kept = _read_records(partial, ckpt.emitted_count)
        write_atomic(partial, "".join(kept))
        stack, emitted = list(ckpt.frontier), ckpt.emitted_count
    else:
        write_atomic(partial, "")
        stack, emitted = [TreeNode(ROOT)], 0

    with open(partial, "a", encoding="utf-8") as fh:
        while stack:
            node = stack.pop()
            if node.triple.c > c_bound:
                continue
            fh.write(node.to_json() + "\n")
            emitted += 1
            stack.extend(reversed(node.children()))
            if halt_after is not None and emitted >= halt_after:
                # leave records past the last checkpoint on disk, as a real kill would
                fh.flush()
                os._exit(137)
            if emitted % interval == 0:
                fh.flush()
                os.fsync(fh.fileno())
                write_atomic(checkpoint_path, Checkpoint(c_bound, stack, emitted).to_json())
        fh.flush()

    lines = _read_records(partial, emitted)
    nodes = [TreeNode.from_record(json.loads(ln)) for ln in lines]
    write_atomic(out_path, render(nodes))
    partial.unlink()
    checkpoint_path.unlink(missing_ok=True)
    return len(nodes)

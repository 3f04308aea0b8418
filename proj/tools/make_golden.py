#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the pinned codec fixtures in tests/data with explicit struct packing."""
import struct
import sys
from pathlib import Path

out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "tests" / "data")
out.mkdir(parents=True, exist_ok=True)

# Raw (2,2,2) tensor with entries 0..7.
dims = [2, 2, 2]
raw = b"STARMTEN" + struct.pack("<BBI", 1, 0, len(dims)) + struct.pack("<3Q", *dims)
raw += struct.pack("<8d", *[float(i) for i in range(8)])
(out / "golden_tensor.bin").write_bytes(raw)

# Compressed (2,3,2) artifact: custom swap transform, ranks (1,0).
dims = [2, 3, 2]
cmp_ = b"STARMCMP" + struct.pack("<BBdI", 1, 2, 0.25, len(dims)) + struct.pack("<3Q", *dims)
cmp_ += struct.pack("<B", 3)                 # custom kind for mode 3
cmp_ += struct.pack("<Q", 2)                 # N
cmp_ += struct.pack("<2I", 1, 0)             # ranks
cmp_ += struct.pack("<4d", 0.0, 1.0, 1.0, 0.0)  # 2x2 swap, column-major
cmp_ += struct.pack("<2d", 1.0, 0.0)         # U block of slice 0
cmp_ += struct.pack("<3d", 2.0, -1.0, 0.5)   # G block of slice 0
(out / "golden_compressed.bin").write_bytes(cmp_)

#!/usr/bin/env python3
"""Convert an image (e.g. TIFF) to 8-bit grayscale PGM via Pillow.

Convenience wrapper for preparing benchmark inputs; the codec itself
only reads PBM/PGM.
"""

import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) != 3:
        print(f"usage: {sys.argv[0]} <input-image> <output.pgm>",
              file=sys.stderr)
        return 2
    from PIL import Image
    import numpy as np
    from quadbayes.pnm import write_pgm

    gray = np.asarray(Image.open(sys.argv[1]).convert("L"), dtype=np.uint8)
    Path(sys.argv[2]).write_bytes(write_pgm(gray))
    print(f"{sys.argv[1]} -> {sys.argv[2]} ({gray.shape[1]}x{gray.shape[0]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())

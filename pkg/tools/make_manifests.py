"""Regenerate the bundled manifest data files.

Run from the repo root:  python tools/make_manifests.py
"""

from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "podium" / "data"

# ---------------------------------------------------------------- acoustic

LINEAR = {"rms_mean", "rms_sd", "rms_slope"}
# gain shifts mfcc1 additively; pause_ratio uses an absolute dBFS floor
EXEMPT = {"mfcc1_mean", "pause_ratio"}


def acoustic_entries():
    names = []
    for i in range(1, 14):
        names.append(f"mfcc{i}_mean")
    for i in range(1, 14):
        names.append(f"mfcc{i}_sd")
    for i in range(1, 14):
        names.append(f"dmfcc{i}_mean")
    for i in range(1, 14):
        names.append(f"dmfcc{i}_sd")
    for i in range(1, 14):
        names.append(f"ddmfcc{i}_mean")
    names += [
        "f0_mean", "f0_sd", "f0_min", "f0_max", "f0_range",
        "f0_median", "f0_slope", "f0_cv", "voiced_ratio",
    ]
    names += ["f1_mean", "f1_sd", "f2_mean", "f2_sd", "f3_mean", "f3_sd"]
    for key in ("centroid", "rolloff", "flux", "flatness", "bandwidth"):
        names += [f"{key}_mean", f"{key}_sd"]
    names += ["zcr_mean", "zcr_sd"]
    names += ["rms_mean", "rms_sd", "rms_slope"]
    names += ["jitter", "shimmer", "hnr"]
    names += ["pause_ratio", "voiced_segment_rate", "energy_range_db"]
    assert len(names) == 101, len(names)
    for n in names:
        cls = "linear" if n in LINEAR else ("none" if n in EXEMPT else "invariant")
        yield n, cls


def write_acoustic():
    lines = ["# Acoustic descriptor layout: entry,<name>,<scale class under waveform gain>",
             "version,1"]
    for name, cls in acoustic_entries():
        lines.append(f"entry,{name},{cls}")
    (DATA / "acoustic_manifest.txt").write_text("\n".join(lines) + "\n")


# ------------------------------------------------------------------ facial
# Region seeds use FaceMesh topology anchors; each region is padded to 30
# indices deterministically from its own seed list. Pairs are two ring
# offsets over the 30 indices (60 pairs), triplets one ring walk (30).

REGION_SEEDS = {
    "eyes": [33, 7, 163, 144, 145, 153, 154, 155, 133, 173, 157, 158, 159, 160,
             161, 246, 263, 249, 390, 373, 374, 380, 381, 382, 362, 398, 384,
             385, 386, 387],
    "eyebrows": [46, 53, 52, 65, 55, 70, 63, 105, 66, 107, 276, 283, 282, 295,
                 285, 300, 293, 334, 296, 336, 156, 35, 124, 383, 265, 353, 46,
                 53, 52, 65],
    "lips": [61, 146, 91, 181, 84, 17, 314, 405, 321, 375, 291, 409, 270, 269,
             267, 0, 37, 39, 40, 185, 78, 95, 88, 178, 87, 14, 317, 402, 318,
             324],
    "nose": [1, 2, 98, 327, 168, 6, 197, 195, 5, 4, 75, 97, 326, 305, 19, 94,
             141, 370, 462, 250, 458, 461, 354, 461, 125, 44, 45, 51, 3, 248],
    "jaw": [152, 148, 176, 149, 150, 136, 172, 58, 132, 93, 234, 377, 400, 378,
            379, 365, 397, 288, 361, 323, 454, 162, 127, 389, 356, 389, 368,
            139, 34, 227],
    "cheeks": [50, 101, 100, 47, 205, 187, 207, 216, 206, 203, 280, 330, 329,
               277, 425, 411, 427, 436, 426, 423, 116, 117, 118, 119, 345, 346,
               347, 348, 123, 352],
    "forehead": [10, 338, 297, 332, 284, 251, 21, 54, 103, 67, 109, 151, 337,
                 299, 333, 298, 301, 108, 69, 104, 68, 71, 9, 8, 107, 336, 66,
                 296, 105, 334],
}


def pad_region(seed, k=30):
    out = []
    for v in seed:
        if v not in out:
            out.append(v)
    step = 1
    while len(out) < k:
        for v in list(out):
            cand = (v + step) % 478
            if cand not in out:
                out.append(cand)
                if len(out) == k:
                    break
        step += 1
    return out[:k]


def write_facial():
    lines = ["# Facial landmark regions: 30 indices, 60 pairs, 30 triplets each",
             "version,1"]
    for region, seed in REGION_SEEDS.items():
        idx = pad_region(seed)
        assert len(set(idx)) == 30 and all(0 <= v < 478 for v in idx)
        pairs = [(idx[i], idx[(i + 1) % 30]) for i in range(30)]
        pairs += [(idx[i], idx[(i + 7) % 30]) for i in range(30)]
        trips = [(idx[i], idx[(i + 1) % 30], idx[(i + 2) % 30]) for i in range(30)]
        lines.append(f"region,{region}")
        lines.append("landmarks," + ",".join(map(str, idx)))
        lines.append("pairs," + ",".join(f"{a}:{b}" for a, b in pairs))
        lines.append("triplets," + ",".join(f"{a}:{b}:{c}" for a, b, c in trips))
    (DATA / "facial_manifest.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    write_acoustic()
    write_facial()
    print("wrote", DATA / "acoustic_manifest.txt")
    print("wrote", DATA / "facial_manifest.txt")

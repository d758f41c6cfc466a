"""Wall-clock time of recommend as candidates, team size and skill count grow."""

import argparse
import time

from teamrep.corpus import CollaborationNetwork, Team
from teamrep.kernel import DEFAULT_MU, recommend
from teamrep.motifs import enumerate_motifs
from teamrep.synth import SplitMix64, skill_labels


def fixture(n_cand, t, n_skills, seed=99):
    rng = SplitMix64(seed)
    members = [f"m{i}" for i in range(t)]
    edges = [(members[i], members[i + 1]) for i in range(t - 1)]
    edges += [(members[i], members[i + 2]) for i in range(0, t - 2, 2)]
    cands = [f"c{i:04d}" for i in range(n_cand)]
    edges += [(c, members[1 + rng.below(t - 1)]) for c in cands]
    labels = skill_labels(n_skills)
    skills = {v: rng.subset(labels, 0.5) for v in members + cands}
    return CollaborationNetwork.from_edges(edges, skills=skills), Team("bench", tuple(members))


def timed(n_cand, t, n_skills, threads, mu):
    g, team = fixture(n_cand, t, n_skills)
    index = enumerate_motifs(g)
    t0 = time.perf_counter()
    recommend(g, index, team, "m0", mu=mu, hops=0, threads=threads)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--candidates", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--team-size", type=int, nargs="+", default=[5, 9])
    ap.add_argument("--skills", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--mu", type=float, default=DEFAULT_MU)
    args = ap.parse_args()
    print(f"{'c':>6}{'t':>4}{'r':>5}{'seconds':>10}")
    for c in args.candidates:
        for t in args.team_size:
            for r in args.skills:
                print(f"{c:>6}{t:>4}{r:>5}{timed(c, t, r, args.threads, args.mu):>10.3f}")


if __name__ == "__main__":
    main()

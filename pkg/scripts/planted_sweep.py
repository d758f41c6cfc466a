"""Detection, replacement and communication-cost rates on planted instances across noise levels."""

import argparse
from statistics import fmean

from teamrep.errors import ConvergenceError
from teamrep.familiarity import detect_outliers
from teamrep.kernel import DEFAULT_MU, candidate_pool, recommend
from teamrep.metrics import avg_shortest_path, sum_distance, team_skill_set
from teamrep.motifs import enumerate_motifs
from teamrep.synth import generate_planted


def run(noise, seeds, mu, base_seed):
    detected = replaced = path_wins = cost_wins = errors = 0
    for i in range(seeds):
        inst = generate_planted(base_seed + i, 3 + i % 7, noise=noise)
        g, p = inst.network, inst.planted_outlier
        index = enumerate_motifs(g)
        detected += detect_outliers(g, index, inst.team)[0].scholar == p
        remaining = inst.team.without(p)
        try:
            top = recommend(g, index, inst.team, p, k=1, mu=mu, ablations=False)[0].candidate
        except ConvergenceError:
            errors += 1
            continue
        replaced += top == inst.planted_best_candidate
        pool = sorted(candidate_pool(g, remaining, exclude={p}))
        skills = team_skill_set(g, remaining)
        path = [avg_shortest_path(g, (c, *remaining)) for c in pool]
        cost = [sum_distance(g, (c, *remaining), skills) for c in pool]
        path_wins += path[pool.index(top)] <= fmean(path)
        cost_wins += cost[pool.index(top)] <= fmean(cost)
    return detected, replaced, path_wins, cost_wins, errors


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--mu", type=float, default=DEFAULT_MU)
    args = ap.parse_args()
    print(f"{'noise':>6}{'detect':>8}{'replace':>9}{'path<=':>8}{'cost<=':>8}{'inadm':>7}")
    for noise in args.noise:
        d, r, pw, cw, e = run(noise, args.seeds, args.mu, args.seed)
        print(f"{noise:>6.2f}{d:>8}{r:>9}{pw:>8}{cw:>8}{e:>7}")


if __name__ == "__main__":
    main()

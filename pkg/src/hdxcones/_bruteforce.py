"""Pure-Python brute-force sweep over all k-cochains.

Twin of the compiled kernel in _kernel.pyx: identical signature and
semantics, selected at import time by hdxcones.expansion when the compiled
module is unavailable.  Coefficients are element indices 0..q-1 of a finite
group; a cochain is identified with its mixed-radix key sum(phi[i] * q^i).
"""

import bisect

BACKEND = "pure"


def sweep(nk, q, add, neg, cob_faces, cob_signs, cob_w, level_w,
          member_keys, dist_rows, collect_kernel):
    """Sweep all q^nk assignments;  returns
    (found, best_num, best_den, best_key, kernel_keys).

    - dnorm(phi)  = sum of cob_w over (k+1)-simplices with nonzero coboundary
    - dist(phi)   = min over dist_rows of the weighted disagreement in level_w
    - phi with key in member_keys (sorted) are skipped
    - minimizes dnorm/dist over the rest; kernel_keys lists keys with dnorm=0
      when collect_kernel is set.
    """
    total = q**nk
    n_cob = len(cob_faces)
    n_rows = len(dist_rows)
    phi = [0] * nk
    kernel_keys = [] if collect_kernel else None
    best_num = -1
    best_den = 1
    best_key = -1
    add_rows = [list(r) for r in add]
    neg_list = list(neg)
    faces = [list(r) for r in cob_faces]
    signs = [list(r) for r in cob_signs]
    rows = [list(r) for r in dist_rows]
    wts = list(level_w)
    cw = list(cob_w)
    members = list(member_keys)

    for key in range(total):
        dnorm = 0
        for t in range(n_cob):
            acc = 0
            fr = faces[t]
            sr = signs[t]
            for idx in range(len(fr)):
                v = phi[fr[idx]]
                if sr[idx] < 0:
                    v = neg_list[v]
                acc = add_rows[acc][v]
            if acc:
                dnorm += cw[t]
        if collect_kernel and dnorm == 0:
            kernel_keys.append(key)
        pos = bisect.bisect_left(members, key)
        is_member = pos < len(members) and members[pos] == key
        if not is_member:
            dist = -1
            for r in rows:
                d = 0
                for i in range(nk):
                    if phi[i] != r[i]:
                        d += wts[i]
                if dist < 0 or d < dist:
                    dist = d
                    if dist == 0:
                        break
            if dist > 0:
                if best_num < 0 or dnorm * best_den < best_num * dist:
                    best_num = dnorm
                    best_den = dist
                    best_key = key
        # odometer
        for i in range(nk):
            phi[i] += 1
            if phi[i] == q:
                phi[i] = 0
            else:
                break
    return (best_num >= 0, best_num, best_den, best_key, kernel_keys or [])

use super::Fst;

/// States reachable from the start.
pub fn accessible(fst: &Fst) -> Vec<bool> {
    let mut seen = vec![false; fst.num_states()];
    let Some(start) = fst.start() else {
        return seen;
    };
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        for a in fst.arcs(s) {
            if !seen[a.nextstate] {
                seen[a.nextstate] = true;
                stack.push(a.nextstate);
            }
        }
    }
    seen
}

/// States from which some final state is reachable.
pub fn coaccessible(fst: &Fst) -> Vec<bool> {
    let n = fst.num_states();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in fst.states() {
        for a in fst.arcs(s) {
            rev[a.nextstate].push(s);
        }
    }
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = fst.states().filter(|&s| fst.is_final(s)).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &rev[s] {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    seen
}

/// Restricts `fst` to states that are both accessible and coaccessible.
/// Surviving states keep their relative order. Arcs with a zero weight are
/// dropped too, since no path through them contributes.
pub fn connect(fst: &Fst) -> Fst {
    let acc = accessible(fst);
    let coacc = coaccessible(fst);
    let keep: Vec<bool> = acc.iter().zip(&coacc).map(|(&a, &c)| a && c).collect();
    let mut out = fst.clone();
    let kind = fst.semiring();
    for s in out.states() {
        out.arcs_mut(s).retain(|a| !kind.is_zero(a.weight));
    }
    if keep.iter().all(|&k| k) {
        return out;
    }
    match fst.start() {
        Some(s) if keep[s] => out.retain_states(&keep),
        _ => out.clear_states(),
    }
    out
}

"""Regenerates the golden covariance snapshots with numpy.

Each state is assembled from its optical elements (squeezed inputs, EPR
sources, beam splitters, Gaussian modulation) rather than closed forms.

    python3 crates/cli/golden/generate.py
"""

from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


class State:
    def __init__(self):
        self.labels = []
        self.cm = np.zeros((0, 0))

    def attach(self, labels, block):
        n = self.cm.shape[0]
        m = block.shape[0]
        cm = np.zeros((n + m, n + m))
        cm[:n, :n] = self.cm
        cm[n:, n:] = block
        self.cm = cm
        self.labels += labels
        return self

    def squeezed(self, label, v):
        return self.attach([label], np.diag([v, 1.0 / v]))

    def vacuum(self, label):
        return self.squeezed(label, 1.0)

    def epr(self, a, b, v):
        c = np.sqrt(v * v - 1.0)
        blk = np.array([[v, 0, c, 0], [0, v, 0, -c], [c, 0, v, 0], [0, -c, 0, v]], dtype=float)
        return self.attach([a, b], blk)

    def idx(self, label):
        return self.labels.index(label)

    def symplectic(self, s):
        self.cm = s @ self.cm @ s.T
        return self

    def beamsplitter(self, a, b, t):
        ia, ib = self.idx(a), self.idx(b)
        s = np.eye(self.cm.shape[0])
        tt, rr = np.sqrt(t), np.sqrt(1.0 - t)
        for q in (0, 1):
            ra, rb = 2 * ia + q, 2 * ib + q
            s[ra, ra], s[ra, rb], s[rb, ra], s[rb, rb] = tt, rr, -rr, tt
        return self.symplectic(s)

    def modulate(self, pattern, v):
        a = np.zeros(self.cm.shape[0])
        for label, q, w in pattern:
            a[2 * self.idx(label) + q] += w
        self.cm = self.cm + v * np.outer(a, a)
        return self


def snapshot(state):
    lines = ["# modes " + " ".join(state.labels)]
    for row in state.cm:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def multimode(v_s, v_m, k, eta):
    st = State().squeezed("B", v_s).squeezed("L", v_s)
    st.modulate([("B", 0, 1.0), ("L", 0, k)], v_m)
    st.modulate([("B", 1, 1.0), ("L", 1, -k)], v_m)
    return st.vacuum("E").beamsplitter("B", "E", eta)


def premod(v_s, v_m, eta_e, eta):
    st = State().squeezed("B", v_s).vacuum("ES").beamsplitter("B", "ES", eta_e)
    st.modulate([("B", 0, 1.0)], v_m)
    st.modulate([("B", 1, 1.0)], v_m)
    return st.vacuum("E").beamsplitter("B", "E", eta)


def premod_purification(v_s, v_m, eta_e, t1, v0):
    st = State().squeezed("A", v0).epr("C", "D", v_m / (1.0 - t1)).squeezed("B", v_s).vacuum("ES")
    st.beamsplitter("B", "ES", eta_e).beamsplitter("A", "C", t1).beamsplitter("D", "B", t1)
    return st


GOLDEN = {
    "multimode_pm.snap": multimode(0.5, 4.0, 1.0, 0.3),
    "premod_pm.snap": premod(0.3, 2.0, 0.6, 0.7),
    "premod_eb_pre_channel.snap": premod_purification(0.3, 2.0, 0.6, 0.999, 1e-3),
}

if __name__ == "__main__":
    for name, st in GOLDEN.items():
        (HERE / name).write_text(snapshot(st))
        print(name)

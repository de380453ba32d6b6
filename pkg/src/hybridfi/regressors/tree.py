from dataclasses import dataclass

import numpy as np

LEAF = -1


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """
    Array-encoded binary CART tree. Node 0 is the root; a sample goes left when
    `x[feature] <= threshold`. Leaves have `feature == LEAF`.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_node_samples: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while np.any(active):
            idx = rows[active]
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_node_samples": self.n_node_samples.tolist(),
        }


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray, min_samples_leaf: int):
    """
    Exhaustive variance-reduction split search over `features` (ascending).

    Ties are broken by the lowest feature index, then the lowest threshold, which is
    the first maximum of the gain matrix flattened feature-major.

    Returns:
        (gain, feature, threshold) or None when no admissible split exists.
    """
    n = y.shape[0]
    Xf = X[:, features]
    order = np.argsort(Xf, axis=0, kind="stable")
    xs = np.take_along_axis(Xf, order, axis=0)
    yc = y - y.mean()
    ys = yc[order]

    total = ys.sum(axis=0)
    left_sum = np.cumsum(ys, axis=0)[:-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    gain = left_sum**2 / n_left + (total - left_sum) ** 2 / n_right - total**2 / n

    admissible = (xs[1:] > xs[:-1]) & (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    if not np.any(admissible):
        return None
    gain = np.where(admissible, gain, -np.inf)

    flat = gain.T.ravel()
    best = int(np.argmax(flat))
    f_pos, pos = divmod(best, n - 1)
    lo, hi = xs[pos, f_pos], xs[pos + 1, f_pos]
    threshold = lo + (hi - lo) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return float(flat[best]), int(features[f_pos]), float(threshold)


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> RegressionTree:
    """
    Grow a CART regression tree depth-first.

    A node becomes a leaf when it is pure, when `max_depth` is reached, when it
    holds fewer than 2 * min_samples_leaf samples, or when no split strictly
    reduces the squared error. With `max_features` below the feature count a
    fresh subset is drawn from `rng` at every split.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_features = X.shape[1]
    all_features = np.arange(n_features)
    subsample = max_features is not None and max_features < n_features
    if subsample and rng is None:
        raise ValueError("feature subsampling requires an rng")

    feature, threshold, left, right, value, counts = [], [], [], [], [], []

    def new_node(rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[rows].mean()))
        counts.append(int(rows.shape[0]))
        return len(feature) - 1

    root = new_node(np.arange(X.shape[0]))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        y_node = y[rows]
        if max_depth is not None and depth >= max_depth:
            continue
        if rows.shape[0] < 2 * min_samples_leaf:
            continue
        sse = float(np.sum((y_node - y_node.mean()) ** 2))
        if sse <= 0.0:
            continue
        features = np.sort(rng.choice(n_features, size=max_features, replace=False)) if subsample else all_features
        found = _best_split(X[rows], y_node, features, min_samples_leaf)
        if found is None:
            continue
        gain, f, thr = found
        if not gain > 1e-12 * sse:
            continue
        goes_left = X[rows, f] <= thr
        left_rows, right_rows = rows[goes_left], rows[~goes_left]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        # right pushed first so the left subtree is numbered first
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return RegressionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
        n_node_samples=np.asarray(counts, dtype=np.int64),
    )

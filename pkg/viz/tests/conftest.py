import numpy as np
import pytest

CLUSTER_SIZES = (15, 15, 15, 55)


def write_embedding_csv(path, matrix):
    d = matrix.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# config-hash=test seed=0 version=0\n")
        fh.write("node," + ",".join(f"e{i}" for i in range(d)) + "\n")
        for node, row in enumerate(matrix):
            fh.write(f"{node}," + ",".join(f"{x:.17g}" for x in row) + "\n")


@pytest.fixture()
def labels():
    return np.repeat(np.arange(4), CLUSTER_SIZES)


@pytest.fixture()
def labels_file(tmp_path, labels):
    path = tmp_path / "graph.edgelist"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#nodes {len(labels)}\n")
        for v in range(len(labels) - 1):
            fh.write(f"{v}\t{v + 1}\t1\n")
        for v, c in enumerate(labels):
            fh.write(f"#label\t{v}\t{c}\n")
    return path


@pytest.fixture()
def embedding_factory(tmp_path, labels):
    """Synthetic d=32 embeddings: one gaussian blob per community."""

    def make(name, seed, dimension=32):
        rng = np.random.default_rng(seed)
        centers = rng.normal(scale=8.0, size=(4, dimension))
        matrix = centers[labels] + rng.normal(scale=1.0, size=(len(labels), dimension))
        path = tmp_path / name
        write_embedding_csv(path, matrix)
        return path

    return make

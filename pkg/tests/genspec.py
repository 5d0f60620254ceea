"""Random valid GraphSpec generator for property tests.

Builds shape-correct stacks (matmul/addbias/relu with occasional
branching off earlier activations) ending in a softmax that serves as
both output and loss target. Dimensions stay in [1, 8] so gradient
checks and pagerank oracles run fast.
"""

import random
import string

from graphforge import GraphSpec, InputDecl, LossDecl, NodeDecl, OpKind, ParamDecl, Shape


def _fresh_name(rnd: random.Random, taken: set, prefix: str) -> str:
    while True:
        name = prefix + "".join(rnd.choices(string.ascii_lowercase, k=3))
        if name not in taken:
            taken.add(name)
            return name


def random_spec(rnd: random.Random, max_extra_layers: int = 3) -> GraphSpec:
    taken: set = set()
    d0 = rnd.randint(1, 8)
    n_classes = rnd.randint(2, 8)
    x = _fresh_name(rnd, taken, "in_")
    inputs = [InputDecl(x, Shape((None, d0)))]
    params: list = []
    nodes: list = []
    # pool of rank-2 activations we may branch from: (name, width)
    pool = [(x, d0)]
    cur, cur_w = x, d0

    for _ in range(rnd.randint(0, max_extra_layers)):
        if rnd.random() < 0.25:
            cur, cur_w = rnd.choice(pool)
        op = rnd.choice(["matmul", "addbias", "relu"])
        name = _fresh_name(rnd, taken, "n_")
        if op == "matmul":
            w = rnd.randint(1, 8)
            pname = _fresh_name(rnd, taken, "w_")
            params.append(ParamDecl(pname, Shape((cur_w, w)), rnd.choice(["zeros", "glorot"])))
            nodes.append(NodeDecl(name, OpKind.MATMUL, (cur, pname)))
            cur, cur_w = name, w
        elif op == "addbias":
            pname = _fresh_name(rnd, taken, "b_")
            params.append(ParamDecl(pname, Shape((cur_w,)), rnd.choice(["zeros", "glorot"])))
            nodes.append(NodeDecl(name, OpKind.ADDBIAS, (cur, pname)))
            cur = name
        else:
            nodes.append(NodeDecl(name, OpKind.RELU, (cur,)))
            cur = name
        pool.append((cur, cur_w))

    # head: project to n_classes, then softmax
    wname = _fresh_name(rnd, taken, "w_")
    params.append(ParamDecl(wname, Shape((cur_w, n_classes)), "glorot"))
    logits = _fresh_name(rnd, taken, "n_")
    nodes.append(NodeDecl(logits, OpKind.MATMUL, (cur, wname)))
    probs = _fresh_name(rnd, taken, "n_")
    nodes.append(NodeDecl(probs, OpKind.SOFTMAX, (logits,)))

    return GraphSpec(
        name="gen_" + "".join(rnd.choices(string.ascii_lowercase, k=4)),
        inputs=tuple(inputs),
        params=tuple(params),
        nodes=tuple(nodes),
        output=probs,
        loss=LossDecl("cross_entropy", probs),
    )

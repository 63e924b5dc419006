"""
Quantum-native tokenization
===========================

Rule-based lexing keeps gate names and qubit operands whole and folds the
numbered formal-qubit names into one token, so the vocabulary stays small while
one-token-per-line vocabularies keep growing with the register size.
"""

from groverlab import GroverSpec, build_grover, print_program
from groverlab.circuits import sample_specs
from groverlab.tokenizer import build_vocabulary, corpus_stats, tokenize_line, tokenize_program

for line in ["gate Oracle _gate_q_0, _gate_q_1 {", "x _gate_q_3;", "rz(0.5) q[1];", "}"]:
    print(f"{line!r:40} -> {tokenize_line(line)}")

text = print_program(build_grover(GroverSpec.optimal(3, ["010"])))
tokens = tokenize_program(text)
print(len(text), "characters ->", len(tokens), "tokens")

# a small corpus: 4 programs per (n, t)
corpus = {
    n: [print_program(build_grover(s)) for t in range(1, min(n, 3) + 1) for s in sample_specs(n, t, 4, seed=n * 10 + t)]
    for n in range(2, 8)
}
stats = corpus_stats(corpus)
print(stats.to_csv())

vocab = build_vocabulary(tokenize_program(p) for programs in corpus.values() for p in programs)
print("joint quantum-native vocabulary:", len(vocab), "tokens")

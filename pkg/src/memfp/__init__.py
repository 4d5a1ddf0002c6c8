"""memfp: behavioral plagiarism detection for ECMAScript mini-programs.

Fingerprints runtime behavior instead of source text: candidate
expressions are instrumented, memory invariants are collected during
sandboxed execution, organized into Memory Dependency Graphs, and scored
pairwise for similarity that survives deep obfuscation.
"""

__version__ = "0.1.0"

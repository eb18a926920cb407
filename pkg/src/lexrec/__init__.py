"""Lexical error recovery by noisy-channel token passing."""

"""Quantum-dot two-photon turnstile simulator."""

"""Command Line Interface (CLI) module for gfsdro.

Subcommands: ``run``, ``compare``, ``validate``, ``gradcheck`` and ``oracle``.
Exit codes are 0 on success, 1 on an invalid spec and 2 on a runtime failure.
"""

"""Amalgamated products of free groups: normal forms, measures, genericity."""

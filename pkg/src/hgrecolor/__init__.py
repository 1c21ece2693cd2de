"""Random recoloring of simple hypergraphs, failure certificates, and Local-Lemma bounds."""

"""
chernloc package initialization.
Localized characteristic classes on chart models: forms, bundles, Cech-de Rham
integration, residues and the extendability obstruction.
"""

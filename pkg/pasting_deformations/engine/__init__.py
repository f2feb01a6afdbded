# Engine modules for pasting_deformations

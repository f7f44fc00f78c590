# Experiment workflow and command-line plumbing

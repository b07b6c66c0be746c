import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# Reference and hypothesis of the worked WER example used across the suite.
WORKED_REF = "he bought um twenty ga- games"
WORKED_HYP = "He bought um 20 games."

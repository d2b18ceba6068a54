"""
Ontoprobe - competency-question evaluation of SUMO-style ontologies with first-order provers
"""
from ontoprobe.cli import main

if __name__ == "__main__":
    main()

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Budget:
    """Combinatorial caps shared by every module. All are plain integers."""

    max_tuple: int = 6
    max_arity: int = 8
    max_universe: int = 64
    arrow_domain: int = 64
    exhaustive_domain: int = 20
    max_nodes: int = 5_000_000
    age_candidates: int = 200_000
    max_atoms_export: int = 5

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


DEFAULT_BUDGET = Budget()


def resolve(budget):
    return DEFAULT_BUDGET if budget is None else budget

from approx.exceptions import InfeasibleError
from approx.fixtures import planar_builtin
from approx.formats import format_table, write_table
from approx.management.base import ApproxCommand
from approx.propc import approximate_by_products, blowup_study, domain_rule
from approx.serializers import PropcConfigSerializer

PRODUCT_COLUMNS = ("N", "columns", "rank", "solver", "residual")
BLOWUP_COLUMNS = ("t", "eps", "residual", "norm", "feasible")


class Command(ApproxCommand):
    help = "Products of harmonic functions and the plane-wave blow-up study."
    name = "propc"
    serializer_class = PropcConfigSerializer

    def add_arguments(self, parser):
        actions = self.add_action_parsers(parser, PropcConfigSerializer.ACTIONS)
        for sub in actions.values():
            self.add_common_arguments(sub)
            sub.add_argument("--domain", help="disc or annulus")
        actions["products"].add_argument("--f", help="target: builtin:x1, builtin:r2 or builtin:exp-cos")
        actions["products"].add_argument("--N", help="comma separated harmonic degrees")
        actions["blowup"].add_argument("--t", help="comma separated direction parameters")
        actions["blowup"].add_argument("--eps", help="comma separated, strictly decreasing residual targets")
        actions["blowup"].add_argument("--n-alpha", type=int, help="number of plane-wave directions")

    def execute_run(self, config, out):
        rule = domain_rule(config["domain"])
        if config["action"] == "products":
            target = planar_builtin(config["f"])
            fits = approximate_by_products(target(rule[0]), rule, config["N"])
            columns = PRODUCT_COLUMNS
            rows = [(f.degree, f.columns, f.rank, f.solver, f.residual) for f in fits]
            infeasible = []
        else:
            found = blowup_study(config["t"], config["eps"], config["n_alpha"], rule)
            columns = BLOWUP_COLUMNS
            rows = [(r.t, r.target, r.residual, r.coeff_norm, "yes" if r.feasible else "no") for r in found]
            infeasible = [r for r in found if not r.feasible]
        write_table(self.written(out), columns, rows)
        self.stdout.write(format_table(columns, rows), ending="")
        if infeasible:
            pairs = ", ".join(f"t={r.t:g} eps={r.target:g}" for r in infeasible)
            raise InfeasibleError(f"residual targets out of reach with {config['n_alpha']} directions: {pairs}")

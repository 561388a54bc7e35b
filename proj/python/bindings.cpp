#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atomslit/blockers.hpp"
#include "atomslit/dynamics.hpp"
#include "atomslit/protocol.hpp"
#include "atomslit/stats.hpp"
#include "atomslit/tripod.hpp"

namespace py = pybind11;
using namespace atomslit;

namespace {

RunConfig make_config(const std::string& method, double delta_t, int cycles, double bias_phi,
                      const std::optional<PhysicalParams>& params,
                      const std::optional<ComplexMatrix>& closing) {
  RunConfig c;
  if (params) c.params = *params;
  c.method = parse_block_method(method);
  c.delta_t = delta_t;
  c.cycles = cycles;
  c.bias_phi = bias_phi;
  c.closing = closing;
  return c;
}

ProbabilityTable to_table(const std::map<std::string, double>& m) {
  return ProbabilityTable::from_map(m);
}

}  // namespace

PYBIND11_MODULE(atomslit, m) {
  m.doc() = "Three-path atomic Ramsey interferometer: fringes, Sorkin parameter, shot noise";

  py::register_exception<DegenerateOperatingPoint>(m, "DegenerateOperatingPoint");
  py::register_exception<InvalidParams>(m, "InvalidParams", PyExc_ValueError);

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("rabi", &PhysicalParams::rabi)
      .def_readwrite("detuning", &PhysicalParams::detuning)
      .def_readwrite("zeeman_ground", &PhysicalParams::zeeman_ground)
      .def_readwrite("zeeman_excited", &PhysicalParams::zeeman_excited)
      .def_readwrite("linewidth", &PhysicalParams::linewidth)
      .def_property(
          "branching", [](const PhysicalParams& p) { return p.branching.r; },
          [](PhysicalParams& p, const std::array<std::array<double, 3>, 3>& r) { p.branching.r = r; })
      .def("validate", &PhysicalParams::validate)
      .def("__repr__", [](const PhysicalParams& p) {
        return "PhysicalParams(rabi=" + std::to_string(p.rabi) + ", detuning=" + std::to_string(p.detuning) +
               ", zeeman_ground=" + std::to_string(p.zeeman_ground) + ")";
      });

  m.def("default_params", &default_params);
  m.def("zeeman_splitting", &zeeman_splitting, py::arg("b_field"), py::arg("lande"));
  m.def("tritter_time", &tritter_time, py::arg("params"));
  m.def("tritter_unitary", py::overload_cast<const PhysicalParams&>(&tritter_unitary), py::arg("params"));
  m.def("effective_hamiltonian", &effective_hamiltonian, py::arg("params"));
  m.def("ac_stark_shift", &ac_stark_shift, py::arg("params"));
  m.def("ac_stark_phase", &ac_stark_phase, py::arg("params"));

  m.def(
      "probability_table",
      [](const std::string& method, double delta_t, int cycles, double bias_phi,
         std::optional<PhysicalParams> params, std::optional<ComplexMatrix> closing) {
        return probability_table(make_config(method, delta_t, cycles, bias_phi, params, closing)).to_map();
      },
      py::arg("method") = "erase", py::arg("delta_t") = kDefaultOperatingPoint, py::arg("cycles") = 1,
      py::arg("bias_phi") = 0.0, py::arg("params") = py::none(), py::arg("closing") = py::none(),
      "Click probabilities keyed by open-set label ('123', '12', ..., '0').");

  m.def(
      "fringes",
      [](const std::string& method, const std::vector<double>& grid, std::optional<PhysicalParams> params) {
        const RunConfig c = make_config(method, 0.0, 1, 0.0, params, std::nullopt);
        std::vector<std::map<std::string, double>> rows;
        for (const FringePoint& pt : fringe_scan(c, grid)) {
          auto row = pt.table.to_map();
          row["delta_T_rad"] = pt.delta_t;
          rows.push_back(std::move(row));
        }
        return rows;
      },
      py::arg("method"), py::arg("grid"), py::arg("params") = py::none());

  m.def("sorkin_s3", [](const std::map<std::string, double>& t) { return sorkin_s3(to_table(t)); });
  m.def("s2", [](const std::map<std::string, double>& t, int j, int k) { return s2(to_table(t), j, k); });
  m.def("kappa", [](const std::map<std::string, double>& t) { return kappa(to_table(t)); });

  m.def(
      "kappa_monte_carlo",
      [](std::uint64_t events, std::uint64_t repeats, std::uint64_t seed, const std::string& method,
         double delta_t, unsigned threads) {
        const RunConfig c = make_config(method, delta_t, 1, 0.0, std::nullopt, std::nullopt);
        KappaEstimate e;
        {
          py::gil_scoped_release release;
          e = kappa_monte_carlo(c, {events, repeats, seed, false, threads});
        }
        py::dict d;
        d["mean"] = e.mean;
        d["std"] = e.std;
        d["s3_mean"] = e.s3_mean;
        d["s3_std"] = e.s3_std;
        d["exact_kappa"] = e.exact_kappa;
        d["n_total"] = e.n_total;
        d["counts"] = e.per_config_counts;
        return d;
      },
      py::arg("events"), py::arg("repeats"), py::arg("seed"), py::arg("method") = "erase",
      py::arg("delta_t") = kDefaultOperatingPoint, py::arg("threads") = 1);

  m.def(
      "adiabatic_elimination_error",
      [](const PhysicalParams& p) {
        const AdiabaticEliminationReport r = adiabatic_elimination_error(p);
        py::dict d;
        d["infidelity"] = r.infidelity;
        d["max_excited_population"] = r.max_excited_population;
        d["tritter_time"] = r.tritter_time;
        d["leakage_scale"] = r.leakage_scale;
        return d;
      },
      py::arg("params"));
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tdwsmir/app.hpp"
#include "tdwsmir/config.hpp"
#include "tdwsmir/directivity.hpp"
#include "tdwsmir/error.hpp"
#include "tdwsmir/image_source.hpp"

namespace py = pybind11;
using namespace tdw;

namespace {

nlohmann::json to_native(const py::object& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// Accepts a path (str / os.PathLike) or a dict shaped like a config file.
RunConfig resolve_config(const py::object& cfg, const std::string& base_dir) {
  RunConfig c;
  if (py::isinstance<py::dict>(cfg)) {
    c = parse_run_config(to_native(cfg), base_dir.empty() ? std::filesystem::current_path() : std::filesystem::path(base_dir));
  } else {
    c = load_run_config(py::str(py::module_::import("os").attr("fspath")(cfg)).cast<std::string>());
  }
  validate_run_config(c);
  return c;
}

py::array_t<double> channels_array(const std::vector<std::vector<double>>& ch) {
  const std::size_t q = ch.size(), n = ch.empty() ? 0 : ch.front().size();
  py::array_t<double> out({q, n});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t k = 0; k < n; ++k) v(i, k) = ch[i][k];
  return out;
}

py::array_t<std::complex<double>> coeff_array(std::span<const Complex> c) {
  py::array_t<std::complex<double>> out(c.size());
  std::copy(c.begin(), c.end(), out.mutable_data());
  return out;
}

py::dict signals_dict(const MicSignals& s) {
  py::dict d;
  d["fs"] = s.fs;
  d["signals"] = channels_array(s.channels);
  std::vector<std::pair<double, double>> dirs;
  for (const auto& a : s.directions) dirs.emplace_back(a.theta, a.phi);
  d["directions"] = dirs;
  d["gain"] = s.gain;
  return d;
}

}  // namespace

PYBIND11_MODULE(tdwsmir, m) {
  m.doc() = "Time-domain wideband image-source RIRs for open spherical microphone arrays";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("default_config", [] { return to_python(to_json(default_run_config())); },
        "Default run configuration as a dict.");

  m.def(
      "simulate",
      [](const py::object& cfg, bool anechoic, bool postprocessed, const std::string& base_dir) {
        const RunConfig c = resolve_config(cfg, base_dir);
        py::gil_scoped_release release;
        MicSignals s = simulate_mic_signals(c, anechoic);
        if (postprocessed) s = postprocess(s, c);
        py::gil_scoped_acquire acquire;
        return signals_dict(s);
      },
      py::arg("config"), py::arg("anechoic") = false, py::arg("postprocess") = false, py::arg("base_dir") = "",
      "Mic signals for a config path or dict: {'fs', 'signals' (mics x samples), 'directions', 'gain'}.");

  m.def(
      "simulate_sh",
      [](const py::object& cfg, bool anechoic, const std::string& base_dir) {
        RunConfig c = resolve_config(cfg, base_dir);
        if (anechoic) c.simulation.images = ImageSelection::count(1);
        const SourceSpec src = make_source_spec(c);
        SHTimeSeries z;
        {
          py::gil_scoped_release release;
          z = simulate_rir_sh(c.room, src, c.array.center, c.array.radius, c.simulation);
        }
        py::array_t<std::complex<double>> out({z.frames(), z.width()});
        std::copy(z.data().begin(), z.data().end(), out.mutable_data());
        py::dict d;
        d["fs"] = z.fs();
        d["start"] = z.start();
        d["order"] = z.order();
        d["coefficients"] = out;
        return d;
      },
      py::arg("config"), py::arg("anechoic") = false, py::arg("base_dir") = "",
      "Observed SH coefficients: 'coefficients' is frames x (N+1)^2, index n*n+n+m, frame k at (start+k)/fs.");

  m.def(
      "compare",
      [](const py::object& cfg, bool anechoic, const std::string& base_dir) {
        const RunConfig c = resolve_config(cfg, base_dir);
        CompareReport r;
        {
          py::gil_scoped_release release;
          r = run_compare(c, anechoic);
        }
        py::list bands;
        for (const auto& b : r.bands) {
          py::dict d;
          d["f_lo"] = b.f_lo;
          d["f_hi"] = b.f_hi;
          d["max_db"] = b.deviation.max_db;
          d["mean_db"] = b.deviation.mean_db;
          bands.append(d);
        }
        std::vector<std::string> files;
        for (const auto& f : r.files) files.push_back(f.string());
        py::dict out;
        out["bands"] = bands;
        out["files"] = files;
        return out;
      },
      py::arg("config"), py::arg("anechoic") = false, py::arg("base_dir") = "",
      "Runs the compare subcommand (writes its CSV/JSON outputs) and returns the band summary.");

  m.def(
      "pattern_to_sh",
      [](const std::string& kind, int order) { return coeff_array(pattern_to_sh(AnalyticPattern::parse(kind), order).coeffs()); },
      py::arg("kind"), py::arg("order") = 1);

  m.def(
      "sph_harmonics",
      [](int order, double theta, double phi) {
        const auto y = tdw::sph_harmonics(order, theta, phi);
        return coeff_array(y);
      },
      py::arg("order"), py::arg("theta"), py::arg("phi"));

  m.def(
      "enumerate_images",
      [](const std::array<double, 3>& dims, const std::array<double, 6>& beta, const std::array<double, 3>& source,
         const std::array<double, 3>& reference, int count, int max_order) {
        if ((count > 0) == (max_order >= 0)) throw DomainError("give exactly one of count or max_order");
        const RoomSpec room{dims, beta};
        room.validate();
        const auto sel = count > 0 ? ImageSelection::count(count) : ImageSelection::max_order(max_order);
        py::list out;
        for (const auto& img : tdw::enumerate_images(room, source, reference, sel)) {
          py::dict d;
          d["position"] = img.position;
          d["counts"] = img.counts;
          d["attenuation"] = img.attenuation;
          d["distance"] = img.distance;
          out.append(d);
        }
        return out;
      },
      py::arg("dimensions"), py::arg("beta"), py::arg("source"), py::arg("reference"), py::arg("count") = 0,
      py::arg("max_order") = -1);
}

#include "ihsim/ihsim.h"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "ihsim/config.hpp"
#include "ihsim/driver.hpp"
#include "ihsim/error.hpp"
#include "ihsim/output.hpp"
#include "ihsim/verification.hpp"
#include "json.hpp"

namespace {

using ihsim::ErrorKind;

thread_local std::string g_last_error;

struct Report {
  std::string json;
  bool passed = false;
};

template <typename T, std::uint32_t Magic>
struct Handle {
  explicit Handle(T* obj) : magic(Magic), object(obj) {}
  ~Handle() { magic = 0; }
  T* get() {
    if (magic != Magic) ihsim::fail(ErrorKind::InvalidArgument, "handle has wrong type or was destroyed");
    return object.get();
  }
  std::uint32_t magic;
  std::unique_ptr<T> object;
};

int status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return IHSIM_ERROR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return IHSIM_ERROR_PARSE;
    case ErrorKind::Validation: return IHSIM_ERROR_VALIDATION;
    case ErrorKind::Io: return IHSIM_ERROR_IO;
    case ErrorKind::Solver: return IHSIM_ERROR_SOLVER;
    case ErrorKind::Geometry: return IHSIM_ERROR_VALIDATION;
  }
  return IHSIM_ERROR_UNKNOWN;
}

struct NullPointer {
  const char* name;
};

template <typename F>
int guard(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const NullPointer& e) {
    g_last_error = std::string("argument ") + e.name + " is null";
    return IHSIM_ERROR_NULL_POINTER;
  } catch (const ihsim::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return IHSIM_ERROR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IHSIM_ERROR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown exception";
    return IHSIM_ERROR_UNKNOWN;
  }
}

#define IHSIM_NON_NULL(p) \
  do {                    \
    if (!(p)) throw NullPointer{#p}; \
  } while (0)

}  // namespace

struct ihsim_config_struct : Handle<ihsim::RunConfig, 0x1c0f1901> {
  using Handle::Handle;
};
struct ihsim_simulation_struct : Handle<ihsim::Simulation, 0x1c051302> {
  using Handle::Handle;
};
struct ihsim_report_struct : Handle<Report, 0x1c4e7003> {
  using Handle::Handle;
};

namespace {

int make_report(ihsim_report_t* out, std::string json, bool passed) {
  *out = new ihsim_report_struct(new Report{std::move(json), passed});
  return IHSIM_OK;
}

}  // namespace

extern "C" {

const char* ihsim_last_error(void) { return g_last_error.c_str(); }

const char* ihsim_error_description(int status) {
  switch (status) {
    case IHSIM_OK: return "ok";
    case IHSIM_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case IHSIM_ERROR_NULL_POINTER: return "null pointer";
    case IHSIM_ERROR_PARSE: return "parse error";
    case IHSIM_ERROR_VALIDATION: return "validation error";
    case IHSIM_ERROR_IO: return "i/o error";
    case IHSIM_ERROR_SOLVER: return "solver failure";
    case IHSIM_ERROR_CHECK_FAILED: return "check failed";
    case IHSIM_ERROR_INSUFFICIENT_BUFFER: return "insufficient buffer";
    default: return "unknown error";
  }
}

int ihsim_config_load(ihsim_config_t* cfg, const char* path) {
  return guard([&] {
    IHSIM_NON_NULL(cfg);
    IHSIM_NON_NULL(path);
    *cfg = new ihsim_config_struct(new ihsim::RunConfig(ihsim::load_config(path)));
    return IHSIM_OK;
  });
}

int ihsim_config_parse(ihsim_config_t* cfg, const char* text) {
  return guard([&] {
    IHSIM_NON_NULL(cfg);
    IHSIM_NON_NULL(text);
    *cfg = new ihsim_config_struct(new ihsim::RunConfig(ihsim::parse_config(text)));
    return IHSIM_OK;
  });
}

int ihsim_config_destroy(ihsim_config_t cfg) {
  return guard([&] {
    if (cfg) cfg->get();
    delete cfg;
    return IHSIM_OK;
  });
}

int ihsim_simulation_create(ihsim_simulation_t* sim, ihsim_config_t cfg) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    IHSIM_NON_NULL(cfg);
    *sim = new ihsim_simulation_struct(new ihsim::Simulation(*cfg->get()));
    return IHSIM_OK;
  });
}

int ihsim_simulation_step(ihsim_simulation_t sim) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    ihsim::Simulation* s = sim->get();
    if (s->finished()) ihsim::fail(ErrorKind::InvalidArgument, "simulation already reached the final time");
    s->step();
    return IHSIM_OK;
  });
}

int ihsim_simulation_run(ihsim_simulation_t sim, const char* out_dir, int quiet) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    IHSIM_NON_NULL(out_dir);
    ihsim::Simulation* s = sim->get();
    ihsim::run_to_directory(*s, out_dir, quiet != 0);
    const auto summary = nlohmann::json::parse(ihsim::audit_json(*s));
    const bool ok = summary["bounds_pass"].get<bool>() && summary["dissipation_pass"].get<bool>() &&
                    summary["hardened_set_monotone"].get<bool>() && summary["periodic_failures"].get<int>() == 0;
    if (!ok) {
      g_last_error = "run finished but the audit flagged a violation (see summary.json)";
      return IHSIM_ERROR_CHECK_FAILED;
    }
    return IHSIM_OK;
  });
}

int ihsim_simulation_time(ihsim_simulation_t sim, double* t, int* step, int* steps_total) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    const ihsim::Simulation* s = sim->get();
    if (t) *t = s->state().t;
    if (step) *step = s->state().step;
    if (steps_total) *steps_total = s->steps_total();
    return IHSIM_OK;
  });
}

int ihsim_simulation_field(ihsim_simulation_t sim, int field, double* out, size_t* len) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    IHSIM_NON_NULL(len);
    const ihsim::SimulationState& st = sim->get()->state();
    const std::vector<double>* v = nullptr;
    switch (field) {
      case IHSIM_FIELD_THETA: v = &st.theta; break;
      case IHSIM_FIELD_Z: v = &st.z; break;
      case IHSIM_FIELD_A: v = &st.a; break;
      case IHSIM_FIELD_A_T: v = &st.a_t; break;
      case IHSIM_FIELD_JOULE: v = &st.joule; break;
      default: ihsim::fail(ErrorKind::InvalidArgument, "unknown field selector " + std::to_string(field));
    }
    const size_t avail = *len;
    *len = v->size();
    if (!out) return IHSIM_OK;
    if (avail < v->size()) return IHSIM_ERROR_INSUFFICIENT_BUFFER;
    std::copy(v->begin(), v->end(), out);
    return IHSIM_OK;
  });
}

int ihsim_simulation_summary(ihsim_simulation_t sim, ihsim_report_t* report) {
  return guard([&] {
    IHSIM_NON_NULL(sim);
    IHSIM_NON_NULL(report);
    const ihsim::Simulation* s = sim->get();
    std::string json = ihsim::audit_json(*s);
    const auto j = nlohmann::json::parse(json);
    const bool ok = j["bounds_pass"].get<bool>() && j["dissipation_pass"].get<bool>();
    return make_report(report, std::move(json), ok);
  });
}

int ihsim_simulation_destroy(ihsim_simulation_t sim) {
  return guard([&] {
    if (sim) sim->get();
    delete sim;
    return IHSIM_OK;
  });
}

int ihsim_verify(ihsim_report_t* report) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    const auto cases = ihsim::run_battery();
    bool ok = true;
    for (const auto& c : cases) ok = ok && c.pass;
    return make_report(report, ihsim::battery_json(cases), ok);
  });
}

int ihsim_skin_depth(ihsim_report_t* report, double frequency, double sigma, double mu) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    if (!(frequency > 0.0) || !(sigma > 0.0) || !(mu > 0.0)) {
      ihsim::fail(ErrorKind::InvalidArgument, "frequency, sigma and mu must be positive");
    }
    const ihsim::SkinDepthResult base = ihsim::skin_depth_case(frequency, sigma, mu);
    const ihsim::SkinDepthResult quad = ihsim::skin_depth_case(4.0 * frequency, sigma, mu, base.analytic);
    const double halving = std::abs(quad.fitted / base.fitted - 0.5) / 0.5;
    nlohmann::ordered_json j;
    j["frequency"] = frequency;
    j["analytic"] = base.analytic;
    j["fitted"] = base.fitted;
    j["relative_error"] = base.relative_error();
    j["windows"] = base.windows;
    j["fitted_4f"] = quad.fitted;
    j["halving_deviation"] = halving;
    const bool ok = base.relative_error() <= 0.05 && halving <= 0.10;
    j["pass"] = ok;
    return make_report(report, j.dump(2), ok);
  });
}

int ihsim_stability_probe(ihsim_report_t* report, ihsim_config_t cfg, const double* eps, size_t n_eps,
                          int perturb_theta0) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    IHSIM_NON_NULL(cfg);
    IHSIM_NON_NULL(eps);
    const std::vector<double> list(eps, eps + n_eps);
    const ihsim::StabilityReport r = ihsim::stability_probe(*cfg->get(), list, perturb_theta0 != 0);
    nlohmann::ordered_json j;
    j["perturbation"] = perturb_theta0 ? "theta0" : "source";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
      nlohmann::ordered_json x;
      x["eps"] = e.eps;
      x["D_eps"] = e.d_eps;
      x["D_half"] = e.d_half;
      x["ratio"] = e.ratio;
      x["pass"] = e.pass;
      arr.push_back(x);
    }
    j["entries"] = arr;
    j["pass"] = r.pass;
    return make_report(report, j.dump(2), r.pass);
  });
}

int ihsim_compare_freq(ihsim_report_t* report, ihsim_config_t cfg, int quiet) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    IHSIM_NON_NULL(cfg);
    const auto r = ihsim::compare_frequencies(*cfg->get(), [&](const std::string& label, const ihsim::Simulation& s) {
      if (quiet) return;
      std::fprintf(stderr, "%s step %d/%d t=%.6g\n", label.c_str(), s.state().step, s.steps_total(), s.state().t);
    });
    nlohmann::ordered_json j;
    for (const ihsim::FrequencyRun* f : {&r.mf, &r.hf, &r.both}) {
      nlohmann::ordered_json x;
      x["root"] = f->root;
      x["tip"] = f->tip;
      x["amp_mf"] = f->amp_mf;
      x["amp_hf"] = f->amp_hf;
      x["seconds"] = f->seconds;
      j[f->label] = x;
    }
    j["thresholds"] =
        "artifact thresholds (the ordering alone is qualitative): MF root > 2 tip, HF tip > 2 root, "
        "MF+HF root and tip > 0.5 of the single-frequency best";
    j["mf_root_over_2tip"] = r.mf_root_selective;
    j["hf_tip_over_2root"] = r.hf_tip_selective;
    j["combined_over_half_best"] = r.combined_covers;
    j["pass"] = r.pass();
    return make_report(report, j.dump(2), r.pass());
  });
}

int ihsim_report_json(ihsim_report_t report, char* out, size_t* len) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    IHSIM_NON_NULL(len);
    const std::string& s = report->get()->json;
    const size_t need = s.size() + 1;
    const size_t avail = *len;
    *len = need;
    if (!out || avail < need) return IHSIM_ERROR_INSUFFICIENT_BUFFER;
    std::memcpy(out, s.c_str(), need);
    return IHSIM_OK;
  });
}

int ihsim_report_passed(ihsim_report_t report, int* passed) {
  return guard([&] {
    IHSIM_NON_NULL(report);
    IHSIM_NON_NULL(passed);
    *passed = report->get()->passed ? 1 : 0;
    return IHSIM_OK;
  });
}

int ihsim_report_destroy(ihsim_report_t report) {
  return guard([&] {
    if (report) report->get();
    delete report;
    return IHSIM_OK;
  });
}

}  // extern "C"

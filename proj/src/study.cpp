#include "karst/study.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "karst/assembly.hpp"

namespace karst {

LevelSolution solve_level(const ManufacturedCase& mc, const DofMap& dm, const StudyOptions& opts) {
  const bool nonconforming = !dm.reference().conforming;
  const SparseSystem sys = assemble_system(dm, mc.data, /*penalty=*/nonconforming);
  const ReducedSystem red = apply_dirichlet(sys, dm);

  LevelSolution out;
  const Eigen::VectorXd x = solve(red, opts.solver, &out.solving);
  out.u_h = FeFunction::from_full_vector(dm, red.expand(x));

  const int deg = opts.quad_degree > 0 ? opts.quad_degree : assembly_quad_degree(dm.family());
  const ProjectedData proj = project_data(mc.data, dm.mesh(), deg + 4);
  EstimatorOptions eopts;
  eopts.quad_degree = deg;
  out.report = estimate(out.u_h, mc.data, proj, make_mode(nonconforming, opts.isotropic), eopts);
  return out;
}

std::vector<StudyLevel> run_study(const ManufacturedCase& mc, FamilyTag family,
                                  const std::vector<Mesh>& meshes, const StudyOptions& opts) {
  if (meshes.size() < 2) throw std::invalid_argument("study: need at least two levels");

  std::vector<StudyLevel> levels;
  for (int lvl = 0; lvl < static_cast<int>(meshes.size()); ++lvl) {
    const Mesh& mesh = meshes[lvl];
    const DofMap dm(mesh, family);
    const bool nonconforming = !dm.reference().conforming;
    LevelSolution sol;
    try {
      sol = solve_level(mc, dm, opts);
    } catch (const std::exception& err) {
      throw std::runtime_error("study level " + std::to_string(lvl) + ": " + err.what());
    }
    const int deg = opts.quad_degree > 0 ? opts.quad_degree : assembly_quad_degree(family) + 2;

    StudyLevel rec;
    rec.level = lvl;
    rec.elements = static_cast<int>(mesh.elements.size());
    rec.dofs = dm.total_dof_count();
    rec.h_short_min = 1e300;
    for (const Element& el : mesh.elements) {
      rec.h_short_min = std::min(rec.h_short_min, el.anisotropy.min_length());
      rec.h_long_max = std::max(rec.h_long_max, el.anisotropy.len_long);
      rec.max_aspect = std::max(rec.max_aspect, el.anisotropy.len_long / el.anisotropy.len_short);
    }
    rec.error = error_norm(sol.u_h, mc, nonconforming, deg);
    rec.theta = sol.report.total_theta;
    rec.zeta = sol.report.total_zeta;
    rec.effectivity = (rec.error > 0.0 && rec.theta > 0.0) ? rec.theta / rec.error
                                                           : std::nan("");
    const FeFunction& u_h = sol.u_h;
    try {
      rec.alignment_error = alignment_measure(
          mesh,
          [&](int elem, const Vec2& ref, const Vec2& p) {
            return Vec2(mc.exact_matrix_gradient(p.x(), p.y()) - u_h.gradient(elem, ref));
          },
          deg);
    } catch (const std::invalid_argument&) {
      rec.alignment_error = std::nan("");  // zero error field: m1 undefined
    }
    rec.reliability_const =
        rec.error / (rec.alignment_error * std::hypot(rec.theta, rec.zeta));
    if (nonconforming) rec.jump_seminorm = std::sqrt(penalty_seminorm_sq(u_h, deg));

    if (opts.with_local_efficiency) {
      double worst = 0.0;
      for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
        const double theta_k = sol.report.theta_k(k);
        if (theta_k == 0.0) continue;
        const auto& patch = mesh.element_patch[k];
        double zeta_sum = 0.0;
        for (int kp : patch) zeta_sum += sol.report.zeta_k(kp);
        const double denom = local_error_norm(u_h, mc, patch, nonconforming, deg) + zeta_sum;
        if (denom > 0.0) worst = std::max(worst, theta_k / denom);
      }
      rec.max_local_efficiency = worst;
    }

    rec.solver_iterations = sol.solving.iterations;
    rec.solver_residual = sol.solving.final_residual;
    if (lvl == 0) {
      rec.error_rate = std::nan("");
      rec.theta_rate = std::nan("");
    } else {
      rec.error_rate = std::log2(levels.back().error / rec.error);
      rec.theta_rate = std::log2(levels.back().theta / rec.theta);
    }
    levels.push_back(rec);
  }
  return levels;
}

namespace {
const char* kStudyColumns =
    "level,elements,dofs,h_short_min,h_long_max,max_aspect,error,theta,zeta,"
    "alignment_error,effectivity,reliability_const,max_local_efficiency,jump_seminorm,"
    "solver_iterations,solver_residual,error_rate,theta_rate";
}

std::string study_to_csv(const std::vector<StudyLevel>& levels) {
  std::ostringstream os;
  os << kStudyColumns << "\n";
  char buf[640];
  for (const auto& r : levels) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%d,%.17g,%.17g,%.17g\n",
                  r.level, r.elements, r.dofs, r.h_short_min, r.h_long_max, r.max_aspect, r.error,
                  r.theta, r.zeta, r.alignment_error, r.effectivity, r.reliability_const,
                  r.max_local_efficiency, r.jump_seminorm, r.solver_iterations, r.solver_residual,
                  r.error_rate, r.theta_rate);
    os << buf;
  }
  return os.str();
}

std::string study_to_json(const std::vector<StudyLevel>& levels) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : levels) {
    arr.push_back({{"level", r.level},
                   {"elements", r.elements},
                   {"dofs", r.dofs},
                   {"h_short_min", r.h_short_min},
                   {"h_long_max", r.h_long_max},
                   {"max_aspect", r.max_aspect},
                   {"error", r.error},
                   {"theta", r.theta},
                   {"zeta", r.zeta},
                   {"alignment_error", num(r.alignment_error)},
                   {"effectivity", num(r.effectivity)},
                   {"reliability_const", num(r.reliability_const)},
                   {"max_local_efficiency", r.max_local_efficiency},
                   {"jump_seminorm", r.jump_seminorm},
                   {"solver_iterations", r.solver_iterations},
                   {"solver_residual", r.solver_residual},
                   {"error_rate", num(r.error_rate)},
                   {"theta_rate", num(r.theta_rate)}});
  }
  return nlohmann::json{{"levels", arr}}.dump(2);
}

}  // namespace karst

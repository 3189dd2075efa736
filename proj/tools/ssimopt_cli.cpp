#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssimopt/apps.hpp"
#include "ssimopt/pgm.hpp"
#include "ssimopt/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssimopt;

namespace {

// exit codes: 0 ok, 2 config, 3 I/O, 4 solver
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Image load_image(const std::string& path) {
  try {
    return read_pgm(path);
  } catch (const std::exception& e) {
    throw IoError(std::string("cannot read ") + path + ": " + e.what());
  }
}

void save_image(const std::string& path, const Image& img) {
  try {
    write_pgm(path, img);
  } catch (const std::exception& e) {
    throw IoError(std::string("cannot write ") + path + ": " + e.what());
  }
}

void append_jsonl(const std::string& path, const json& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path);
  out << record.dump() << "\n";
  if (!out) throw IoError("write failed on " + path);
}

struct Options {
  std::string input;
  std::string reference;
  std::string output_dir = ".";
  std::string method = "ssim";
  std::string task = "denoise";  // sweep only
  double lambda = 0.1;
  double target_l0 = -1.0;
  double target_tv = -1.0;
  double sigma = 5.0;
  std::size_t factor = 4;
  std::size_t block_size = 8;
  double rho = 1.0;
  double mu = 1.0;
  double eps = 1e-6;
  std::uint64_t seed = 1;
  int max_iters = 500;
  double noise_psnr = 18.067;
  std::vector<double> targets;
};

ExperimentSpec make_spec(const Options& o) {
  if (o.block_size == 0) throw CLI::ValidationError("--block-size must be positive");
  ExperimentSpec spec;
  spec.method = o.method == "l2" ? Method::l2_baseline : Method::ssim;
  spec.sigma = o.sigma;
  spec.factor = o.factor;
  spec.lambda = o.lambda;
  spec.scheme.block_rows = o.block_size;
  spec.scheme.block_cols = o.block_size;
  spec.seed = o.seed;
  spec.rho = o.rho;
  spec.mu = o.mu;
  spec.eps_abs = o.eps;
  spec.max_iters = o.max_iters;
  if (o.target_l0 >= 0.0)
    spec.target = {RegMatchTarget::Kind::l0_per_block, o.target_l0};
  else if (o.target_tv > 0.0)
    spec.target = {RegMatchTarget::Kind::tv_total, o.target_tv};
  return spec;
}

void emit_artifacts(const Options& o, const std::string& command,
                    const SolveReport& report, const Image& reference,
                    double runtime_s) {
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  save_image((dir / (command + "_recon.pgm")).string(), report.image);
  if (reference.size() > 0 && reference.same_shape(report.image)) {
    BlockScheme scheme{o.block_size, o.block_size};
    save_image((dir / (command + "_ssim_map.pgm")).string(),
               ssim_map(report.image, reference, scheme,
                        SsimConstants::defaults()));
  }
  if (!report.trace.empty()) {
    try {
      write_trace_csv((dir / (command + "_trace.csv")).string(), report,
                      "mssim_vs_reference");
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
  }

  json record{{"command", command},
              {"input", o.input},
              {"method", o.method},
              {"lambda", o.lambda},
              {"target_l0", o.target_l0},
              {"target_tv", o.target_tv},
              {"sigma", o.sigma},
              {"factor", o.factor},
              {"block_size", o.block_size},
              {"rho", o.rho},
              {"mu", o.mu},
              {"eps", o.eps},
              {"seed", o.seed},
              {"max_iters", o.max_iters},
              {"mssim", report.mssim_value},
              {"tv", report.tv_value},
              {"l0", report.l0_count},
              {"converged", report.converged},
              {"iterations", report.iterations},
              {"status", report.status},
              {"runtime_s", runtime_s}};
  append_jsonl((dir / "results.jsonl").string(), record);

  std::cout << command << ": mssim=" << report.mssim_value
            << " tv=" << report.tv_value << " l0=" << report.l0_count
            << " iterations=" << report.iterations << "\n";
}

int run_command(const std::string& command, const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  if (command == "metrics") {
    const Image a = load_image(o.input);
    if (o.reference.empty())
      throw CLI::ValidationError("metrics requires --reference");
    const Image b = load_image(o.reference);
    if (!a.same_shape(b)) throw CLI::ValidationError("image shapes differ");
    BlockScheme scheme{o.block_size, o.block_size};
    const auto k = SsimConstants::defaults();
    const double ms = mssim(a, b, scheme, k);
    const fs::path dir(o.output_dir);
    fs::create_directories(dir);
    save_image((dir / "metrics_ssim_map.pgm").string(),
               ssim_map(a, b, scheme, k));
    json record{{"command", "metrics"}, {"input", o.input},
                {"reference", o.reference}, {"mssim", ms},
                {"psnr", psnr(b, a)},       {"tv", tv_seminorm(a)},
                {"runtime_s", elapsed()}};
    append_jsonl((dir / "results.jsonl").string(), record);
    std::cout << "metrics: mssim=" << ms << " psnr=" << psnr(b, a) << "\n";
    return 0;
  }

  ExperimentSpec spec = make_spec(o);
  Image input = load_image(o.input);
  Image reference =
      o.reference.empty() ? Image() : load_image(o.reference);

  if (command == "sweep") {
    if (o.targets.empty())
      throw CLI::ValidationError("sweep requires --targets");
    if (o.task == "approx")
      spec.task = Task::sparse_approx;
    else if (o.task == "denoise")
      spec.task = Task::denoise;
    else if (o.task == "zoom")
      spec.task = Task::zoom;
    else if (o.task == "deblur")
      spec.task = Task::deblur;
    else if (o.task == "tikhonov")
      spec.task = Task::tikhonov;
    else
      throw CLI::ValidationError("unknown sweep task " + o.task);

    Image sweep_input = input;
    Image sweep_ref = reference;
    if (spec.task == Task::sparse_approx || spec.task == Task::tikhonov) {
      if (sweep_ref.size() == 0) sweep_ref = input;
    } else if (spec.task == Task::denoise) {
      sweep_ref = input;
      sweep_input = add_awgn(input, o.noise_psnr, o.seed);
    }
    std::vector<SweepRow> rows;
    try {
      rows = sweep(sweep_input, sweep_ref, spec, o.targets);
    } catch (const std::exception& e) {
      throw SolverError(e.what());
    }
    const fs::path dir(o.output_dir);
    fs::create_directories(dir);
    try {
      write_sweep_csv((dir / "sweep.csv").string(), rows);
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
    for (const auto& row : rows)
      std::cout << "sweep target=" << row.target
                << (row.ok ? " mssim_ssim=" + std::to_string(row.mssim_ssim) +
                                 " mssim_l2=" + std::to_string(row.mssim_l2)
                           : " error=" + row.error)
                << "\n";
    return 0;
  }

  SolveReport report;
  Image ref_for_map;
  try {
    if (command == "approx") {
      report = run_sparse_approx(input, spec);
      ref_for_map = input;
    } else if (command == "tikhonov") {
      report = run_tikhonov(input, spec);
      ref_for_map = input;
    } else if (command == "denoise") {
      Image noisy = input;
      ref_for_map = reference.size() > 0 ? reference : input;
      if (o.noise_psnr > 0.0 && reference.size() == 0) {
        // input is the clean image; synthesize the degradation here
        noisy = add_awgn(input, o.noise_psnr, o.seed);
        const fs::path dir(o.output_dir);
        fs::create_directories(dir);
        save_image((dir / "denoise_noisy.pgm").string(), noisy);
      }
      report = run_denoise(noisy, ref_for_map, spec);
    } else if (command == "zoom") {
      report = run_zoom(input, spec, reference);
      ref_for_map = reference;
    } else if (command == "deblur") {
      report = run_deblur(input, spec, reference);
      ref_for_map = reference.size() > 0 ? reference : input;
    } else {
      throw CLI::ValidationError("unknown command " + command);
    }
  } catch (const CLI::Error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  } catch (const std::exception& e) {
    throw SolverError(e.what());
  }

  emit_artifacts(o, command, report, ref_for_map, elapsed());
  if (!report.converged) {
    std::cerr << "solver did not converge: " << report.status << "\n";
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSIM-based image optimization toolbox"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain key=value configuration file");

  Options o;
  app.add_option("--input", o.input, "input PGM image");
  app.add_option("--reference", o.reference, "reference PGM image");
  app.add_option("--output-dir", o.output_dir, "artifact directory")
      ->envname("SSIMOPT_OUTPUT_DIR");
  app.add_option("--method", o.method, "ssim | l2")
      ->check(CLI::IsMember({"ssim", "l2"}));
  app.add_option("--task", o.task, "sweep task: approx|denoise|zoom|deblur|tikhonov");
  app.add_option("--lambda", o.lambda, "regularization weight");
  app.add_option("--target-l0", o.target_l0, "per-block l0 target");
  app.add_option("--target-tv", o.target_tv, "TV seminorm target");
  app.add_option("--sigma", o.sigma, "blur standard deviation");
  app.add_option("--factor", o.factor, "zoom factor");
  app.add_option("--block-size", o.block_size, "SSIM block size");
  app.add_option("--rho", o.rho, "ADMM penalty rho");
  app.add_option("--mu", o.mu, "ADMM penalty mu");
  app.add_option("--eps", o.eps, "absolute stopping tolerance");
  app.add_option("--seed", o.seed, "noise seed");
  app.add_option("--max-iters", o.max_iters, "outer iteration cap");
  app.add_option("--noise-psnr", o.noise_psnr,
                 "AWGN level for denoise/sweep (dB; 0 = input already noisy)");
  app.add_option("--targets", o.targets, "sweep regularization targets")
      ->delimiter(',');

  const std::vector<std::string> commands{
      "approx", "denoise", "zoom", "deblur", "tikhonov", "sweep", "metrics"};
  for (const auto& name : commands)
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (o.input.empty()) {
    std::cerr << "config error: --input is required\n";
    return 2;
  }

  try {
    return run_command(command, o);
  } catch (const CLI::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  }
}

// Command-line front end: pipeline reproduction, validation, rendering,
// mock data export, scoring and the HTTP service.
//
// Exit codes: 0 ok, 1 validation dirty, 2 I/O, 3 configuration or network.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "recast/dsl_json.hpp"
#include "recast/error.hpp"
#include "recast/eval.hpp"
#include "recast/render.hpp"
#include "recast/service.hpp"
#include "recast/validate.hpp"

namespace {

enum Exit : int { kOk = 0, kDirty = 1, kIo = 2, kConfig = 3 };

/// Carries an exit code out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Failure{kIo, "cannot write " + path};
}

/// Unparseable documents count as dirty, unreadable files as I/O failures.
recast::DslDocument load_document(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return recast::parse_document(text);
  } catch (const recast::ParseError& e) {
    throw Failure{kDirty, path + ": " + e.what()};
  }
}

recast::Seed parse_seed_option(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') throw Failure{kConfig, "invalid seed: " + s};
  return v;
}

// ------------------------------------------------------------------ commands

struct ReproduceArgs {
  std::string image;
  std::string output = "-";
  std::string fixtures;
  std::string record;
  std::string run_id = "cli";
  int parallel = 0;
};

int cmd_reproduce(const ReproduceArgs& a) {
  recast::ImageInput image;
  {
    std::ifstream probe(a.image, std::ios::binary);
    if (!probe) throw Failure{kIo, "cannot read " + a.image};
  }
  try {
    image = recast::read_image(a.image);
  } catch (const recast::Error& e) {
    throw Failure{kIo, e.what()};
  }

  auto config = recast::MllmEndpointConfig::from_env();
  if (a.parallel > 0) config.max_parallel = a.parallel;
  try {
    config.check();
  } catch (const recast::Error& e) {
    throw Failure{kConfig, e.what()};
  }

  std::unique_ptr<recast::ChatTransport> transport;
  if (!a.fixtures.empty()) {
    try {
      transport = std::make_unique<recast::FixtureTransport>(recast::resolve_fixture_case(a.fixtures, image));
    } catch (const recast::NotFoundError& e) {
      throw Failure{kIo, e.what()};
    }
  } else {
    if (config.api_key.empty())
      throw Failure{kConfig, "live mode needs an API key: set REVIS_API_KEY or pass --fixtures"};
    transport = std::make_unique<recast::HttpTransport>(config);
  }
  std::unique_ptr<recast::RecordingTransport> recorder;
  recast::ChatTransport* active = transport.get();
  if (!a.record.empty()) {
    recorder = std::make_unique<recast::RecordingTransport>(*transport, a.record);
    active = recorder.get();
  }

  auto run = recast::run_pipeline(a.run_id, std::move(image), *active, config, nullptr, [](const recast::PipelineRun& r) {
    std::cerr << "status: " << recast::to_string(r.status) << "\n";
  });
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  if (run.status != recast::RunStatus::done) throw Failure{kConfig, "pipeline failed: " + run.failure};

  write_text(a.output, recast::serialize(*run.document));
  if (run.validation && !run.validation->empty()) std::cerr << recast::format_report(*run.validation);
  return run.validation && run.validation->has_errors() ? kDirty : kOk;
}

int cmd_validate(const std::string& path, bool quiet) {
  const auto doc = load_document(path);
  const auto report = recast::validate(doc);
  if (!quiet) {
    if (report.empty())
      std::cout << path << ": ok\n";
    else
      std::cout << recast::format_report(report);
  }
  return report.has_errors() ? kDirty : kOk;
}

struct RenderArgs {
  std::string input;
  std::string output = "-";
  std::string seed = "0";
  double width = 800;
  double height = 600;
  std::vector<std::string> data;
  int threads = 1;
};

int cmd_render(const RenderArgs& a) {
  if (!(a.width > 0 && a.width <= recast::kMaxRenderSide && a.height > 0 && a.height <= recast::kMaxRenderSide))
    throw Failure{kConfig, "canvas sides must lie in (0, 4096]"};
  const auto doc = load_document(a.input);
  std::vector<recast::UserOverride> overrides;
  for (const auto& spec : a.data) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw Failure{kConfig, "--data expects <container>=<file>, got " + spec};
    const std::string text = read_text(spec.substr(eq + 1));
    try {
      overrides.push_back({recast::ContainerId(spec.substr(0, eq)), recast::parse_user_table(text)});
    } catch (const recast::Error& e) {
      throw Failure{kDirty, spec.substr(eq + 1) + ": " + e.what()};
    }
  }
  try {
    write_text(a.output, recast::render_document(doc, parse_seed_option(a.seed), {a.width, a.height}, overrides,
                                                 a.threads));
  } catch (const recast::NotFoundError& e) {
    throw Failure{kDirty, e.what()};
  } catch (const recast::DataError& e) {
    throw Failure{kDirty, e.what()};
  } catch (const recast::LayoutError& e) {
    throw Failure{kDirty, e.what()};
  }
  return kOk;
}

int cmd_mockdata(const std::string& input, const std::string& container, const std::string& seed,
                 const std::string& format, const std::string& output) {
  const auto doc = load_document(input);
  const recast::ContainerId id(container);
  const auto spec = doc.data_specifications.find(id);
  if (spec == doc.data_specifications.end()) throw Failure{kDirty, "container " + container + " has no data specification"};
  const recast::DataProvider data(doc, parse_seed_option(seed));
  if (!data.has_table(id)) throw Failure{kDirty, "container " + container + " has no data table"};
  const auto& table = data.table(id);
  write_text(output, format == "csv" ? recast::table_to_csv(table, spec->second)
                                     : recast::table_to_json(table, spec->second));
  return kOk;
}

std::string format_report(const recast::AccuracyReport& report, const std::string& format) {
  if (format == "csv") return recast::format_report_csv(report);
  if (format == "json") return recast::format_report_json(report);
  return recast::format_report_text(report);
}

int cmd_diff(const std::string& gt, const std::string& gen, const std::string& format, bool list) {
  const auto truth = load_document(gt);
  const auto generated = load_document(gen);
  recast::AccuracyReport report;
  report.cases.push_back(recast::score(truth, generated, std::filesystem::path(gen).stem().stem().string()));
  std::cout << format_report(report, format);
  if (list && format == "text")
    for (const auto& m : report.cases.front().mismatches)
      std::cout << "  " << m.path.str() << ": expected " << m.expected << ", got " << m.actual << "\n";
  return kOk;
}

int cmd_gallery(const std::string& dir, const std::string& format, int threads, const std::string& output) {
  if (!std::filesystem::is_directory(dir)) throw Failure{kIo, "not a directory: " + dir};
  const auto report = recast::run_gallery(dir, threads, [](const std::filesystem::path& case_dir) {
    return recast::replay_fixture_case(case_dir / "fixtures");
  });
  write_text(output, format_report(report, format));
  for (const auto& e : report.load_errors) std::cerr << "skipped " << e << "\n";
  return report.load_errors.empty() ? kOk : kIo;
}

int cmd_fmt(const std::string& input, const std::string& output, bool in_place, bool check) {
  const std::string text = read_text(input);
  std::string canonical;
  try {
    canonical = recast::canonicalize(text);
  } catch (const recast::ParseError& e) {
    throw Failure{kDirty, input + ": " + e.what()};
  }
  if (check) {
    if (canonical == text) return kOk;
    std::cerr << input << ": not in canonical form\n";
    return kDirty;
  }
  write_text(in_place ? input : output, canonical);
  return kOk;
}

struct ServeArgs {
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> storage;
  std::optional<std::string> fixtures;
  std::optional<int> workers;
};

int cmd_serve(const ServeArgs& a) {
  auto config = recast::ServiceConfig::from_env();
  if (a.host) config.host = *a.host;
  if (a.port) config.port = *a.port;
  if (a.storage) config.storage_path = *a.storage;
  if (a.fixtures) config.fixtures = *a.fixtures;
  if (a.workers) config.workers = *a.workers;
  if (config.workers < 1) throw Failure{kConfig, "--workers must be at least 1"};

  // Handle termination on a dedicated thread so stop() runs outside signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<recast::Service> service;
  int port = 0;
  try {
    service = std::make_unique<recast::Service>(config);
    port = service->bind();
  } catch (const std::exception& e) {
    throw Failure{kConfig, std::string("cannot start service: ") + e.what()};
  }
  std::cerr << "listening on http://" << config.host << ":" << port
            << (config.fixtures ? " (fixture mode)" : "") << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service->stop();
  });
  service->listen();
  // listen() can also return on its own; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recast: chart images to editable declarative specifications"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "recast 1.0.0");

  ReproduceArgs rep;
  auto* reproduce = app.add_subcommand("reproduce", "Run the generation pipeline on a chart image");
  reproduce->add_option("image", rep.image, "PNG, JPEG, GIF or WebP chart image")->required();
  reproduce->add_option("-o,--output", rep.output, "Output document, '-' for stdout")->capture_default_str();
  reproduce->add_option("--fixtures", rep.fixtures,
                        "Replay recorded responses from this directory (one case, or cases matched by image)");
  reproduce->add_option("--record", rep.record, "Save every model response into this directory");
  reproduce->add_option("--run-id", rep.run_id, "Identifier used in logs and transcripts")->capture_default_str();
  reproduce->add_option("--parallel", rep.parallel, "Concurrent leaf calls (defaults to REVIS_PARALLEL or 4)")
      ->check(CLI::PositiveNumber);

  std::string validate_input;
  bool validate_quiet = false;
  auto* validate = app.add_subcommand("validate", "Check a document; exit 0 only when it has no errors");
  validate->add_option("document", validate_input, "Document path or '-'")->required();
  validate->add_flag("-q,--quiet", validate_quiet, "Print nothing, report through the exit code only");

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Render a document to SVG");
  render->add_option("document", ren.input, "Document path or '-'")->required();
  render->add_option("-o,--output", ren.output, "SVG path, '-' for stdout")->capture_default_str();
  render->add_option("--seed", ren.seed, "Mock data seed")->capture_default_str();
  render->add_option("--width", ren.width, "Canvas width in pixels")->capture_default_str();
  render->add_option("--height", ren.height, "Canvas height in pixels")->capture_default_str();
  render->add_option("--data", ren.data, "Replace a container's data: <container>=<json or csv file>, repeatable");
  render->add_option("--threads", ren.threads, "Worker threads for mark generation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string md_input, md_container, md_seed = "0", md_format = "json", md_output = "-";
  auto* mockdata = app.add_subcommand("mockdata", "Print the exemplar data table of a container");
  mockdata->add_option("document", md_input, "Document path or '-'")->required();
  mockdata->add_option("-c,--container", md_container, "Leaf or template container id")->required();
  mockdata->add_option("--seed", md_seed, "Mock data seed")->capture_default_str();
  mockdata->add_option("--format", md_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  mockdata->add_option("-o,--output", md_output, "Output path, '-' for stdout")->capture_default_str();

  std::string diff_gt, diff_gen, diff_format = "text";
  bool diff_list = false;
  auto* diff = app.add_subcommand("diff", "Score a generated document against a ground truth");
  diff->add_option("ground_truth", diff_gt, "Ground-truth document")->required();
  diff->add_option("generated", diff_gen, "Generated document")->required();
  diff->add_option("--format", diff_format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  diff->add_flag("--list", diff_list, "List mismatched attributes (text format)");

  std::string gal_dir, gal_format = "text", gal_output = "-";
  int gal_threads = 1;
  auto* gallery = app.add_subcommand(
      "gallery",
      "Score every case under a directory. A case holds ground_truth.revis.json and either generated.revis.json "
      "or a fixtures/ directory with recorded pipeline responses and image.png");
  gallery->add_option("cases", gal_dir, "Directory of case sub-directories")->required();
  gallery->add_option("--format", gal_format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  gallery->add_option("--threads", gal_threads, "Cases scored in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gallery->add_option("-o,--output", gal_output, "Report path, '-' for stdout")->capture_default_str();

  std::string fmt_input, fmt_output = "-";
  bool fmt_in_place = false, fmt_check = false;
  auto* fmt = app.add_subcommand("fmt", "Rewrite a document in canonical form");
  fmt->add_option("document", fmt_input, "Document path or '-'")->required();
  auto* fmt_out_opt = fmt->add_option("-o,--output", fmt_output, "Output path, '-' for stdout");
  auto* fmt_in_opt = fmt->add_flag("-i,--in-place", fmt_in_place, "Overwrite the input file");
  fmt->add_flag("--check", fmt_check, "Exit 1 when the input is not canonical, write nothing");
  fmt_in_opt->excludes(fmt_out_opt);

  ServeArgs srv;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service (REVIS_* variables supply defaults)");
  serve->add_option("--host", srv.host, "Listen address (default 127.0.0.1)");
  serve->add_option("--port", srv.port, "Listen port, 0 for any (default 8080)")->check(CLI::Range(0, 65535));
  serve->add_option("--storage", srv.storage, "sqlite database path (default recast.db)");
  serve->add_option("--fixtures", srv.fixtures, "Replay recorded responses instead of calling the model");
  serve->add_option("--workers", srv.workers, "Concurrent pipeline runs (default 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*reproduce) return cmd_reproduce(rep);
    if (*validate) return cmd_validate(validate_input, validate_quiet);
    if (*render) return cmd_render(ren);
    if (*mockdata) return cmd_mockdata(md_input, md_container, md_seed, md_format, md_output);
    if (*diff) return cmd_diff(diff_gt, diff_gen, diff_format, diff_list);
    if (*gallery) return cmd_gallery(gal_dir, gal_format, gal_threads, gal_output);
    if (*fmt) return cmd_fmt(fmt_input, fmt_output, fmt_in_place, fmt_check);
    if (*serve) return cmd_serve(srv);
  } catch (const Failure& f) {
    std::cerr << "recast: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "recast: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "actloc/calibration.hpp"
#include "actloc/io.hpp"
#include "actloc/metrics.hpp"
#include "actloc/pipeline.hpp"
#include "actloc/synthetic.hpp"

namespace actloc::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // Pipeline knobs.
  std::string view_weights = "0.6,0.2,0.2";
  std::string rate_weights = "0.5,0.25,0.25";
  std::string window_lengths = "10,15,20,25,30";
  double window_stride = 2.0;
  double actionness_floor = 0.3;
  std::string nms = "linear";
  double nms_threshold = 0.1;
  double nms_sigma = 0.5;
  std::size_t max_proposals = 150;
  double refine_radius = 4.0;
  double edge_width = 1.0;
  double min_edge_contrast = 0.25;
  double flank_width = 1.0;
  std::string proposal_views = "dashboard,right";
  double min_duration = 10.0;
  double max_duration = 30.0;
  double merge_tolerance = 2.0;
  bool strict_single = false;
  double match_tolerance = 1.0;
  double threshold_fallback = 0.0;
  bool optimal_matching = false;
  std::size_t workers = 1;

  // Synthetic scenario.
  std::uint64_t seed = 42;
  double noise = 0.0;
  std::size_t videos = 5;
  std::size_t val_videos = 5;
  std::size_t actions = 17;
  std::string reliability = "1,0.75,0.9";
  double step = 0.5;
  double jitter = 0.0;

  // Files.
  std::string out_dir;
  std::string traces, proposals, detections, gt, thresholds, predictions, out, report;
  std::string val_traces, val_gt;
  std::size_t folds = 1;
  bool ablation = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw InvariantError(std::string("invalid number '") + tok + "' in " + what);
    }
  }
  return out;
}

std::array<double, 3> parse_triple(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 3) throw InvariantError(std::string(what) + " needs exactly three comma-separated values");
  return {v[0], v[1], v[2]};
}

PipelineConfig make_config(const Options& o) {
  PipelineConfig cfg;
  const auto vw = parse_triple(o.view_weights, "view weights");
  cfg.view_weights = {vw[0], vw[1], vw[2]};
  const auto rw = parse_triple(o.rate_weights, "rate weights");
  cfg.rate_weights = {rw[0], rw[1], rw[2]};
  cfg.generator.window_lengths = parse_list(o.window_lengths, "window lengths");
  cfg.generator.window_stride = o.window_stride;
  cfg.generator.actionness_floor = o.actionness_floor;
  cfg.generator.nms_method = parse_nms_method(o.nms);
  cfg.generator.nms_threshold = o.nms_threshold;
  cfg.generator.nms_sigma = o.nms_sigma;
  cfg.generator.max_proposals = o.max_proposals;
  cfg.generator.refine_radius = o.refine_radius;
  cfg.generator.edge_width = o.edge_width;
  cfg.generator.min_edge_contrast = o.min_edge_contrast;
  cfg.generator.flank_width = o.flank_width;
  cfg.proposal_views.clear();
  std::stringstream ss(o.proposal_views);
  for (std::string tok; std::getline(ss, tok, ',');) cfg.proposal_views.push_back(parse_view(tok));
  cfg.post.min_duration = o.min_duration;
  cfg.post.max_duration = o.max_duration;
  cfg.post.merge_tolerance = o.merge_tolerance;
  cfg.post.strict_single = o.strict_single;
  cfg.match_tolerance = o.match_tolerance;
  cfg.threshold_fallback = o.threshold_fallback;
  cfg.workers = o.workers;
  cfg.validate();
  return cfg;
}

ScenarioParams make_scenario_params(const Options& o, bool validation) {
  ScenarioParams p;
  p.seed = validation ? derive_seed(o.seed, {kValidationStream}) : o.seed;
  p.n_videos = validation ? o.val_videos : o.videos;
  p.n_actions_per_video = o.actions;
  p.noise_level = o.noise;
  p.view_reliability = parse_triple(o.reliability, "view reliability");
  p.step = o.step;
  p.video_prefix = validation ? "val" : "video";
  return p;
}

Scenario make_scenario(const Options& o, bool validation) {
  auto sc = generate_scenario(make_scenario_params(o, validation));
  if (o.jitter > 0.0) sc = perturb_boundaries(sc, o.jitter);
  return sc;
}

EvalOptions make_eval_options(const Options& o) {
  EvalOptions e;
  e.match_tolerance = o.match_tolerance;
  e.strategy = o.optimal_matching ? MatchStrategy::Optimal : MatchStrategy::Greedy;
  return e;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

fs::path fold_path(const fs::path& out, std::size_t fold) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + ".fold" + std::to_string(fold + 1) + out.extension().string());
  return p;
}

void write_fold_tables(const fs::path& out, const FoldCalibration& cal) {
  write_thresholds(out, cal.deployment);
  if (cal.folds.size() > 1)
    for (std::size_t f = 0; f < cal.folds.size(); ++f) write_thresholds(fold_path(out, f), cal.folds[f]);
}

// ------------------------------------------------------------ commands

void cmd_synth(const Options& o, std::ostream& out) {
  require(o.out_dir, "--out-dir");
  fs::create_directories(o.out_dir);
  const fs::path dir = o.out_dir;
  const auto test = make_scenario(o, false);
  const auto val = make_scenario(o, true);
  write_score_traces(dir / "traces.txt", test.traces);
  write_ground_truth(dir / "gt.txt", test.gts);
  write_score_traces(dir / "val_traces.txt", val.traces);
  write_ground_truth(dir / "val_gt.txt", val.gts);
  out << "wrote " << test.videos.size() << " test and " << val.videos.size() << " validation videos to "
      << dir.string() << "\n";
}

void cmd_propose(const Options& o, std::ostream& out) {
  require(o.traces, "--traces");
  require(o.out, "--out");
  const auto cfg = make_config(o);
  const auto props = propose_all(read_score_traces(o.traces), cfg);
  write_proposals(o.out, props);
  out << "wrote " << props.size() << " proposals to " << o.out << "\n";
}

void cmd_fuse(const Options& o, std::ostream& out) {
  require(o.traces, "--traces");
  require(o.proposals, "--proposals");
  require(o.out, "--out");
  const auto cfg = make_config(o);
  const auto traces = read_score_traces(o.traces);
  const auto dets = classify_all(traces, read_proposals(o.proposals), cfg);
  write_detections(o.out, dets);
  out << "wrote " << dets.size() << " classified proposals to " << o.out << "\n";
}

void cmd_calibrate(const Options& o, std::ostream& out) {
  require(o.detections, "--detections");
  require(o.gt, "--gt");
  require(o.out, "--out");
  const auto cfg = make_config(o);
  const auto cal = calibrate_folds(read_detections(o.detections), read_ground_truth(o.gt), o.folds, cfg);
  write_fold_tables(o.out, cal);
  out << "wrote thresholds from " << o.folds << " fold(s) to " << o.out << "\n";
}

void cmd_postprocess(const Options& o, std::ostream& out) {
  require(o.detections, "--detections");
  require(o.thresholds, "--thresholds");
  require(o.out, "--out");
  const auto cfg = make_config(o);
  const auto fin = postprocess_all(read_detections(o.detections), read_thresholds(o.thresholds), cfg);
  write_submission(o.out, to_submission(fin));
  out << "wrote " << fin.size() << " detections to " << o.out << "\n";
}

void emit_report(const Options& o, const EvalReport& r, std::ostream& out) {
  out << format_report_table(r);
  if (!o.report.empty()) write_text_file(o.report, format_report_csv(r));
}

void cmd_evaluate(const Options& o, std::ostream& out) {
  require(o.predictions, "--predictions");
  require(o.gt, "--gt");
  std::vector<Prediction> preds;
  for (const auto& row : read_submission(o.predictions)) preds.push_back(to_prediction(row));
  const auto gts = read_ground_truth(o.gt);
  std::optional<std::vector<VideoProposal>> props;
  if (!o.proposals.empty()) props = read_proposals(o.proposals);
  const auto r = props ? evaluate(preds, gts, make_eval_options(o), std::span<const VideoProposal>(*props))
                       : evaluate(preds, gts, make_eval_options(o));
  emit_report(o, r, out);
}

void print_ablation(std::span<const ScoreTrace> traces, std::span<const VideoProposal> props,
                    std::span<const GroundTruthInstance> gts, const ClassThresholds& th, const PipelineConfig& cfg,
                    std::ostream& out) {
  static constexpr const char* kNames[] = {"single model", "+ model voting", "+ threshold filtering",
                                           "+ duplication removal"};
  out << "\nstage                    mIoU    acc   F1\n";
  for (int s = 0; s < 4; ++s) {
    const auto preds = stage_predictions(static_cast<Stage>(s), traces, props, th, cfg);
    const auto q = miou_and_time_positive(preds, gts);
    const auto f = challenge_f1(preds, gts, cfg.match_tolerance);
    char line[128];
    std::snprintf(line, sizeof line, "%-22s  %.3f  %.3f  %.3f\n", kNames[s], q.miou, q.time_positive_accuracy, f.f1);
    out << line;
  }
}

void cmd_pipeline(const Options& o, std::ostream& out) {
  const auto cfg = make_config(o);
  std::optional<fs::path> dir;
  if (!o.out_dir.empty()) {
    dir = o.out_dir;
    fs::create_directories(*dir);
  }

  std::vector<ScoreTrace> traces, val_traces;
  std::vector<GroundTruthInstance> gts, val_gts;
  const bool ingest = !o.traces.empty();
  if (ingest) {
    require(o.gt, "--gt");
    traces = read_score_traces(o.traces);
    gts = read_ground_truth(o.gt);
    if (o.thresholds.empty()) {
      require(o.val_traces, "--val-traces (or --thresholds)");
      require(o.val_gt, "--val-gt (or --thresholds)");
      val_traces = read_score_traces(o.val_traces);
      val_gts = read_ground_truth(o.val_gt);
    }
  } else {
    auto test = make_scenario(o, false);
    auto val = make_scenario(o, true);
    traces = std::move(test.traces);
    gts = std::move(test.gts);
    val_traces = std::move(val.traces);
    val_gts = std::move(val.gts);
    if (dir) {
      write_score_traces(*dir / "traces.txt", traces);
      write_ground_truth(*dir / "gt.txt", gts);
      write_score_traces(*dir / "val_traces.txt", val_traces);
      write_ground_truth(*dir / "val_gt.txt", val_gts);
    }
  }

  ClassThresholds thresholds;
  if (!o.thresholds.empty()) {
    thresholds = read_thresholds(o.thresholds);
  } else {
    const auto val_props = propose_all(val_traces, cfg);
    const auto val_dets = classify_all(val_traces, val_props, cfg);
    const auto cal = calibrate_folds(val_dets, val_gts, o.folds, cfg);
    thresholds = cal.deployment;
    if (dir) {
      write_proposals(*dir / "val_proposals.txt", val_props);
      write_detections(*dir / "val_detections.txt", val_dets);
      write_fold_tables(*dir / "thresholds.txt", cal);
    }
  }

  const auto props = propose_all(traces, cfg);
  const auto dets = classify_all(traces, props, cfg);
  const auto fin = postprocess_all(dets, thresholds, cfg);
  const auto rows = to_submission(fin);
  if (dir) {
    write_proposals(*dir / "proposals.txt", props);
    write_detections(*dir / "detections.txt", dets);
    write_submission(*dir / "submission.txt", rows);
  }
  if (!o.out.empty()) write_submission(o.out, rows);

  // Scored exactly as `evaluate` would score the written submission.
  std::istringstream sub(format_submission(rows));
  std::vector<Prediction> preds;
  for (const auto& row : parse_submission(sub, "submission")) preds.push_back(to_prediction(row));
  const auto report = evaluate(preds, gts, make_eval_options(o));
  out << format_report_table(report);
  if (dir) write_text_file(*dir / "report.csv", format_report_csv(report));
  if (!o.report.empty()) write_text_file(o.report, format_report_csv(report));
  if (o.ablation) print_ablation(traces, props, gts, thresholds, cfg, out);
}

void add_pipeline_options(CLI::App& app, Options& o) {
  app.add_option("--view-weights", o.view_weights, "dashboard,rear,right fusion weights")->capture_default_str();
  app.add_option("--rate-weights", o.rate_weights, "128,64,32-frame fusion weights")->capture_default_str();
  app.add_option("--window-lengths", o.window_lengths, "candidate window lengths in seconds")
      ->capture_default_str();
  app.add_option("--window-stride", o.window_stride, "candidate window stride in seconds")->capture_default_str();
  app.add_option("--actionness-floor", o.actionness_floor, "minimum mean actionness of a candidate")
      ->capture_default_str();
  app.add_option("--nms", o.nms, "NMS method: hard, linear or gaussian")->capture_default_str();
  app.add_option("--nms-threshold", o.nms_threshold, "tIoU threshold for hard and linear NMS")
      ->capture_default_str();
  app.add_option("--nms-sigma", o.nms_sigma, "Gaussian NMS decay parameter")->capture_default_str();
  app.add_option("--max-proposals", o.max_proposals, "proposals kept per video")->capture_default_str();
  app.add_option("--refine-radius", o.refine_radius, "boundary search radius in seconds")->capture_default_str();
  app.add_option("--edge-width", o.edge_width, "edge detector half-width in seconds")->capture_default_str();
  app.add_option("--min-edge-contrast", o.min_edge_contrast, "weakest edge a boundary snaps to")
      ->capture_default_str();
  app.add_option("--flank-width", o.flank_width, "flank width for boundary-contrast scoring")
      ->capture_default_str();
  app.add_option("--proposal-views", o.proposal_views, "views averaged for proposal actionness")
      ->capture_default_str();
  app.add_option("--min-duration", o.min_duration, "shortest reportable action (s)")->capture_default_str();
  app.add_option("--max-duration", o.max_duration, "longest reportable action (s)")->capture_default_str();
  app.add_option("--merge-tolerance", o.merge_tolerance, "duplicate merge tolerance (s)")->capture_default_str();
  app.add_flag("--strict-single", o.strict_single, "keep one proposal per class when the top two do not merge");
  app.add_option("--match-tolerance", o.match_tolerance, "boundary tolerance for matching (s)")
      ->capture_default_str();
  app.add_option("--threshold-fallback", o.threshold_fallback, "thresholds for classes without correct results")
      ->capture_default_str();
  app.add_flag("--optimal-matching", o.optimal_matching, "maximum-cardinality instead of greedy matching");
  app.add_option("--workers", o.workers, "worker threads for per-video work")->capture_default_str();

  app.add_option("--seed", o.seed, "synthetic scenario seed")->capture_default_str();
  app.add_option("--noise", o.noise, "synthetic noise level in [0,1]")->capture_default_str();
  app.add_option("--videos", o.videos, "synthetic test videos")->capture_default_str();
  app.add_option("--val-videos", o.val_videos, "synthetic validation videos")->capture_default_str();
  app.add_option("--actions", o.actions, "actions per synthetic video (<= 17)")->capture_default_str();
  app.add_option("--reliability", o.reliability, "dashboard,rear,right view reliability")->capture_default_str();
  app.add_option("--step", o.step, "synthetic snippet step (s)")->capture_default_str();
  app.add_option("--jitter", o.jitter, "synthetic boundary jitter (s)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Temporal action localization post-processing and evaluation"};
  app.name("actloc");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file with option defaults");
  add_pipeline_options(app, o);

  auto* synth = app.add_subcommand("synth", "generate a synthetic test and validation scenario");
  synth->add_option("--out-dir", o.out_dir, "output directory");

  auto* propose = app.add_subcommand("propose", "generate proposals from score traces");
  propose->add_option("--traces", o.traces, "score trace file");
  propose->add_option("--out", o.out, "proposal list to write");

  auto* fuse = app.add_subcommand("fuse", "classify proposals by multi-view, multi-rate voting");
  fuse->add_option("--traces", o.traces, "score trace file");
  fuse->add_option("--proposals", o.proposals, "proposal list");
  fuse->add_option("--out", o.out, "classified proposals to write");

  auto* calibrate = app.add_subcommand("calibrate", "per-class thresholds from validation results");
  calibrate->add_option("--detections", o.detections, "classified validation proposals");
  calibrate->add_option("--gt", o.gt, "validation ground truth");
  calibrate->add_option("--out", o.out, "deployment threshold table to write");
  calibrate->add_option("--folds", o.folds, "validation folds (videos dealt round-robin)")->capture_default_str();

  auto* post = app.add_subcommand("postprocess", "filter and merge classified proposals into a submission");
  post->add_option("--detections", o.detections, "classified proposals");
  post->add_option("--thresholds", o.thresholds, "threshold table");
  post->add_option("--out", o.out, "submission to write");

  auto* eval = app.add_subcommand("evaluate", "score a submission against ground truth");
  eval->add_option("--predictions", o.predictions, "submission file");
  eval->add_option("--gt", o.gt, "ground truth");
  eval->add_option("--proposals", o.proposals, "proposal list for AR@AN (defaults to the predictions)");
  eval->add_option("--report", o.report, "machine-readable report to write");

  auto* pipe = app.add_subcommand("pipeline", "synthesize or ingest, then propose, fuse, post-process, evaluate");
  pipe->add_option("--out-dir", o.out_dir, "directory for every intermediate file");
  pipe->add_option("--traces", o.traces, "ingest these score traces instead of synthesizing");
  pipe->add_option("--gt", o.gt, "ground truth for ingested traces");
  pipe->add_option("--val-traces", o.val_traces, "validation traces for calibration");
  pipe->add_option("--val-gt", o.val_gt, "validation ground truth for calibration");
  pipe->add_option("--thresholds", o.thresholds, "use this threshold table instead of calibrating");
  pipe->add_option("--folds", o.folds, "validation folds")->capture_default_str();
  pipe->add_option("--out", o.out, "also write the submission here");
  pipe->add_option("--report", o.report, "machine-readable report to write");
  pipe->add_flag("--ablation", o.ablation, "also print the post-processing ablation");

  std::vector<const char*> argv{"actloc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kExitOk;
    }
    err << "actloc: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*synth) cmd_synth(o, out);
    else if (*propose) cmd_propose(o, out);
    else if (*fuse) cmd_fuse(o, out);
    else if (*calibrate) cmd_calibrate(o, out);
    else if (*post) cmd_postprocess(o, out);
    else if (*eval) cmd_evaluate(o, out);
    else if (*pipe) cmd_pipeline(o, out);
  } catch (const CLI::Error& e) {
    err << "actloc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "actloc: parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InvariantError& e) {
    err << "actloc: invalid input: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const IoError& e) {
    err << "actloc: i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "actloc: i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace actloc::cli

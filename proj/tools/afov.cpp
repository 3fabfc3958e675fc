// afov: command-line driver for the pseudo-label / TMP / AFI pipeline.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "afov/afov.hpp"

namespace fs = std::filesystem;
using namespace afov;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Paths {
  std::string scene, teacher, dict, labels, pseudo, gt, spec, config, out;
};

struct AfiFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, beta, s_dist;
  std::optional<int> lattice_m, knn, knn_up, num_classes;
  std::vector<double> rates;
  bool no_coverage = false;
};

struct TmpFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> tau, alpha_image, alpha_text, lr;
  std::optional<int> steps;
  bool no_text_loss = false;
  bool no_superpoints = false;
};

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
  return value;
}

void add_afi_flags(CLI::App* cmd, AfiFlags& f) {
  cmd->add_option("--seed", f.seed, "coverage sampling seed");
  cmd->add_option("--gamma", f.gamma, "minimum direction cosine, in (0,1)");
  cmd->add_option("--beta", f.beta, "coverage odds at zero distance");
  cmd->add_option("--s-dist", f.s_dist, "half-probability distance in meters");
  cmd->add_option("--lattice-m", f.lattice_m, "number of lattice directions");
  cmd->add_option("--knn", f.knn, "encoder neighbourhood size");
  cmd->add_option("--knn-up", f.knn_up, "decoder neighbourhood size");
  cmd->add_option("--rates", f.rates, "per-layer keep ratios, comma separated")->delimiter(',');
  cmd->add_option("--num-classes", f.num_classes, "one-hot width (0 infers from labels)");
  cmd->add_flag("--no-coverage", f.no_coverage, "skip pseudo-label coverage sampling");
}

void add_tmp_flags(CLI::App* cmd, TmpFlags& f) {
  cmd->add_option("--seed", f.seed, "head initialisation seed");
  cmd->add_option("--tau", f.tau, "contrastive temperature");
  cmd->add_option("--alpha-image", f.alpha_image, "weight of the superpixel-superpoint loss");
  cmd->add_option("--alpha-text", f.alpha_text, "weight of the text-superpoint loss");
  cmd->add_option("--steps", f.steps, "gradient steps");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_flag("--no-text-loss", f.no_text_loss, "drop the text-superpoint loss");
  cmd->add_flag("--no-superpoints", f.no_superpoints, "use k-NN point groups instead of mask groups");
}

afi::AfiConfig afi_config(const std::string& config_path, const AfiFlags& f) {
  afi::AfiConfig cfg;
  if (!config_path.empty()) cfg = afi::config_from_json(detail::read_json(config_path));
  if (f.seed) cfg.seed = *f.seed;
  if (f.gamma) cfg.gamma = *f.gamma;
  if (f.beta) cfg.beta = *f.beta;
  if (f.s_dist) cfg.s_dist = *f.s_dist;
  if (f.lattice_m) cfg.lattice_m = *f.lattice_m;
  if (f.knn) cfg.knn = *f.knn;
  if (f.knn_up) cfg.knn_up = *f.knn_up;
  if (f.num_classes) cfg.num_classes = *f.num_classes;
  if (!f.rates.empty()) {
    cfg.rates = f.rates;
    cfg.layers = static_cast<int>(f.rates.size());
  }
  if (f.no_coverage) cfg.coverage_enabled = false;
  afi::validate(cfg);
  return cfg;
}

TrainOptions train_options(const TmpFlags& f) {
  TrainOptions opt;
  if (f.seed) opt.seed = *f.seed;
  if (f.tau) opt.tau = *f.tau;
  if (f.alpha_image) opt.alpha_image = *f.alpha_image;
  if (f.alpha_text) opt.alpha_text = *f.alpha_text;
  if (f.steps) opt.steps = *f.steps;
  if (f.lr) opt.lr = *f.lr;
  if (f.no_text_loss) opt.alpha_text = 0.0;
  opt.superpoints = !f.no_superpoints;
  if (!(opt.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(opt.alpha_image >= 0.0 && opt.alpha_image <= 1.0)) throw ConfigError("alpha-image must be in [0,1]");
  if (!(opt.alpha_text >= 0.0 && opt.alpha_text <= 1.0)) throw ConfigError("alpha-text must be in [0,1]");
  if (opt.steps < 0) throw ConfigError("steps must be non-negative");
  if (!(opt.lr > 0.0)) throw ConfigError("lr must be positive");
  return opt;
}

ClassDictionary load_dict(const std::string& path) {
  return path.empty() ? default_dictionary() : read_dictionary(path);
}

std::vector<MaskSet> load_teacher(const std::string& path) {
  auto t = read_teacher(need(path, "--teacher"));
  return t;
}

fs::path out_dir(const std::string& out) {
  fs::path dir = need(out, "--out");
  fs::create_directories(dir);
  return dir;
}

void write_u8(const fs::path& path, const FovMask& mask) {
  detail::write_raw<std::uint8_t>(path, std::span<const std::uint8_t>(mask));
}

void write_hits_csv(const fs::path& path, const SceneBundle& b) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "point,camera,u,v,depth\n";
  char line[160];
  for (std::size_t c = 0; c < b.cameras.size(); ++c)
    for (const auto& h : project(b.points, b.cameras[c], c)) {
      std::snprintf(line, sizeof line, "%zu,%zu,%d,%d,%.17g\n", h.point, h.camera, h.u, h.v, h.depth);
      out << line;
    }
}

nlohmann::json corr_json(const Correspondence& corr) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : corr.pairs)
    pairs.push_back({{"camera", p.camera}, {"mask", p.mask}, {"label", p.label}, {"text", p.text}, {"points", p.points}});
  return {{"num_pairs", corr.size()}, {"pairs", pairs}};
}

IoUReport evaluate(const LabelField& gt, const LabelField& pred, const ClassDictionary& dict) {
  return miou(confusion(gt, pred, dict.num_classes()));
}

void print_miou(const char* what, const IoUReport& rep) {
  std::printf("%s mIoU %.2f%%\n", what, rep.miou_percent());
}

// ---- subcommands ---------------------------------------------------------

void run_synth(const Paths& p, std::optional<std::uint64_t> seed, std::optional<double> noise) {
  synth::SynthSpec spec;
  if (!p.spec.empty()) spec = synth::spec_from_json(detail::read_json(p.spec));
  if (seed) spec.seed = *seed;
  if (noise) spec.noise_rate = *noise;
  synth::validate(spec);
  const auto dir = out_dir(p.out);
  const auto dict = default_dictionary();
  const auto bundle = synth::generate_scene(spec);
  const auto teacher = synth::generate_teacher(bundle, dict, spec);
  write_bundle(bundle, dir / "scene");
  write_teacher(teacher.images, dir / "teacher");
  write_dictionary(dict, dir / "dict.json");
  detail::write_json(dir / "synthspec.json", synth::to_json(spec));
}

void run_project(const Paths& p) {
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto dir = out_dir(p.out);
  write_hits_csv(dir / "hits.csv", bundle);
  write_u8(dir / "fov.u8", fov_mask(bundle));
}

void run_pseudo(const Paths& p) {
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto teacher = load_teacher(p.teacher);
  const auto dir = out_dir(p.out);
  write_labels(dir / "pseudo.u16", pseudo_labels(bundle, teacher));
  write_u8(dir / "fov.u8", fov_mask(bundle));
}

void run_corr(const Paths& p) {
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto teacher = load_teacher(p.teacher);
  const auto dir = out_dir(p.out);
  detail::write_json(dir / "corr.json", corr_json(build_correspondence(bundle, teacher)));
}

LabelField train_and_predict(const SceneBundle& bundle, const std::vector<MaskSet>& teacher,
                             const ClassDictionary& dict, const TrainOptions& opt, const fs::path& dir) {
  const auto res = train_toy_head(bundle, teacher, dict, opt);
  detail::write_json(dir / "head.json", head_to_json(res.head));
  write_trace(dir / "trace.csv", res.trace);
  auto predict = predict_points(bundle, res.head, teacher.front().text_features, dict);
  write_labels(dir / "predict.u16", predict);
  if (!res.trace.empty())
    std::printf("L_TMP %.6f -> %.6f over %zu steps\n", res.trace.front().l_tmp, res.trace.back().l_tmp,
                res.trace.size());
  return predict;
}

void run_tmp(const Paths& p, const TmpFlags& f) {
  const auto opt = train_options(f);
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto teacher = load_teacher(p.teacher);
  const auto dict = load_dict(p.dict);
  const auto dir = out_dir(p.out);
  train_and_predict(bundle, teacher, dict, opt, dir);
}

void run_afi(const Paths& p, const AfiFlags& f) {
  const auto cfg = afi_config(p.config, f);
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto predict = read_labels(need(p.labels, "--labels"), bundle.size());
  std::optional<LabelField> pseudo;
  if (!p.pseudo.empty()) pseudo = read_labels(p.pseudo, bundle.size());
  const auto fov = fov_mask(bundle);
  const auto dir = out_dir(p.out);
  const auto out = afi::afi(predict, bundle.points, cfg, &fov, pseudo ? &*pseudo : nullptr);
  write_labels(dir / "afi.u16", out);
  detail::write_json(dir / "afi.json", afi::to_json(cfg));
}

void run_eval(const Paths& p) {
  need(p.labels, "--labels");
  need(p.out, "--out");
  if (p.gt.empty()) need(p.scene, "--scene or --gt");
  const auto dict = load_dict(p.dict);
  LabelField gt;
  if (!p.gt.empty()) {
    gt = read_labels(p.gt);
  } else {
    const auto bundle = read_bundle(need(p.scene, "--scene or --gt"));
    if (!bundle.gt_labels) throw Error("scene has no ground-truth labels");
    gt = *bundle.gt_labels;
  }
  const auto pred = read_labels(need(p.labels, "--labels"));
  const auto dir = out_dir(p.out);
  const auto rep = evaluate(gt, pred, dict);
  detail::write_json(dir / "metrics.json", metrics_json(rep, &dict));
  print_miou("eval", rep);
}

void run_render(const Paths& p) {
  const auto bundle = read_bundle(need(p.scene, "--scene"));
  const auto dict = load_dict(p.dict);
  LabelField labels;
  std::string title;
  if (!p.labels.empty()) {
    labels = read_labels(p.labels, bundle.size());
    title = fs::path(p.labels).filename().string();
  } else {
    if (!bundle.gt_labels) throw Error("scene has no ground-truth labels; pass --labels");
    labels = *bundle.gt_labels;
    title = "ground truth";
  }
  fs::path out = need(p.out, "--out");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_svg(out, render_svg(bundle.points, labels, &dict, title));
}

void run_pipeline(const Paths& p, const AfiFlags& af, const TmpFlags& tf, bool no_tmp, bool no_afi) {
  auto cfg = afi_config(p.config, af);
  const auto opt = train_options(tf);
  if (tf.seed) cfg.seed = *tf.seed;
  synth::SynthSpec spec;
  if (!p.spec.empty()) spec = synth::spec_from_json(detail::read_json(p.spec));
  if (tf.seed) spec.seed = *tf.seed;
  synth::validate(spec);
  const auto dir = out_dir(p.out);

  const auto dict = default_dictionary();
  const auto bundle = synth::generate_scene(spec);
  const auto teacher = synth::generate_teacher(bundle, dict, spec).images;
  write_bundle(bundle, dir / "scene");
  write_teacher(teacher, dir / "teacher");
  write_dictionary(dict, dir / "dict.json");
  detail::write_json(dir / "synthspec.json", synth::to_json(spec));

  const auto& gt = *bundle.gt_labels;
  const auto pseudo = pseudo_labels(bundle, teacher);
  const auto fov = fov_mask(bundle);
  write_labels(dir / "pseudo.u16", pseudo);
  write_u8(dir / "fov.u8", fov);
  nlohmann::json metrics;
  metrics["baseline"] = metrics_json(evaluate(gt, pseudo, dict), &dict);
  print_miou("baseline", evaluate(gt, pseudo, dict));

  LabelField predict = pseudo;
  if (!no_tmp) {
    detail::write_json(dir / "corr.json", corr_json(build_correspondence(bundle, teacher)));
    predict = train_and_predict(bundle, teacher, dict, opt, dir);
    metrics["tmp"] = metrics_json(evaluate(gt, predict, dict), &dict);
    print_miou("tmp", evaluate(gt, predict, dict));
  }
  LabelField final_labels = predict;
  if (!no_afi) {
    final_labels = afi::afi(predict, bundle.points, cfg, &fov, &pseudo);
    write_labels(dir / "afi.u16", final_labels);
    detail::write_json(dir / "afi.json", afi::to_json(cfg));
    metrics["afi"] = metrics_json(evaluate(gt, final_labels, dict), &dict);
    print_miou("afi", evaluate(gt, final_labels, dict));
  }
  const auto final_rep = evaluate(gt, final_labels, dict);
  metrics["miou"] = final_rep.miou_percent();
  metrics["stages"] = {{"tmp", !no_tmp}, {"afi", !no_afi}, {"coverage", cfg.coverage_enabled},
                       {"superpoints", opt.superpoints}, {"text_loss", opt.alpha_text > 0.0}};
  detail::write_json(dir / "metrics.json", metrics);
  write_svg(dir / "gt.svg", render_svg(bundle.points, gt, &dict, "ground truth"));
  write_svg(dir / "pseudo.svg", render_svg(bundle.points, pseudo, &dict, "pseudo-labels"));
  write_svg(dir / "final.svg", render_svg(bundle.points, final_labels, &dict, "final labels"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"afov: annotation-free point-cloud segmentation toolkit"};
  app.require_subcommand(1);

  Paths p;
  AfiFlags af;
  TmpFlags tf;
  std::optional<std::uint64_t> synth_seed;
  std::optional<double> synth_noise;
  bool no_tmp = false, no_afi = false;

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene, teacher and dictionary");
  synth_cmd->add_option("--spec", p.spec, "synthspec.json");
  synth_cmd->add_option("--seed", synth_seed, "override the spec seed");
  synth_cmd->add_option("--noise-rate", synth_noise, "override the teacher noise rate");
  synth_cmd->add_option("--out", p.out, "output directory");

  auto* project_cmd = app.add_subcommand("project", "project points into every camera");
  project_cmd->add_option("--scene", p.scene, "scene directory");
  project_cmd->add_option("--out", p.out, "output directory");

  auto* pseudo_cmd = app.add_subcommand("pseudo", "pseudo-labels from teacher masks");
  pseudo_cmd->add_option("--scene", p.scene, "scene directory");
  pseudo_cmd->add_option("--teacher", p.teacher, "teacher directory");
  pseudo_cmd->add_option("--out", p.out, "output directory");

  auto* corr_cmd = app.add_subcommand("corr", "superpixel-superpoint pairs");
  corr_cmd->add_option("--scene", p.scene, "scene directory");
  corr_cmd->add_option("--teacher", p.teacher, "teacher directory");
  corr_cmd->add_option("--out", p.out, "output directory");

  auto* tmp_cmd = app.add_subcommand("tmp", "train the toy projection head");
  tmp_cmd->add_option("--scene", p.scene, "scene directory");
  tmp_cmd->add_option("--teacher", p.teacher, "teacher directory");
  tmp_cmd->add_option("--dict", p.dict, "class dictionary json");
  tmp_cmd->add_option("--out", p.out, "output directory");
  add_tmp_flags(tmp_cmd, tf);

  auto* afi_cmd = app.add_subcommand("afi", "refine labels by flat interaction");
  afi_cmd->add_option("--scene", p.scene, "scene directory");
  afi_cmd->add_option("--labels", p.labels, "predicted labels (u16)");
  afi_cmd->add_option("--pseudo", p.pseudo, "pseudo-labels (u16) for coverage sampling");
  afi_cmd->add_option("--config", p.config, "afi.json");
  afi_cmd->add_option("--out", p.out, "output directory");
  add_afi_flags(afi_cmd, af);

  auto* eval_cmd = app.add_subcommand("eval", "confusion matrix and mIoU");
  eval_cmd->add_option("--scene", p.scene, "scene directory (ground truth)");
  eval_cmd->add_option("--gt", p.gt, "ground-truth labels (u16), instead of --scene");
  eval_cmd->add_option("--labels", p.labels, "predicted labels (u16)");
  eval_cmd->add_option("--dict", p.dict, "class dictionary json");
  eval_cmd->add_option("--out", p.out, "output directory");

  auto* render_cmd = app.add_subcommand("render", "top-down SVG of a label field");
  render_cmd->add_option("--scene", p.scene, "scene directory");
  render_cmd->add_option("--labels", p.labels, "labels (u16); ground truth when omitted");
  render_cmd->add_option("--dict", p.dict, "class dictionary json");
  render_cmd->add_option("--out", p.out, "output svg path");

  auto* pipe_cmd = app.add_subcommand("pipeline", "synth, pseudo, tmp, afi and eval in one go");
  pipe_cmd->add_option("--spec", p.spec, "synthspec.json");
  pipe_cmd->add_option("--config", p.config, "afi.json");
  pipe_cmd->add_option("--out", p.out, "output directory");
  pipe_cmd->add_flag("--no-tmp", no_tmp, "skip head training; AFI refines the pseudo-labels");
  pipe_cmd->add_flag("--no-afi", no_afi, "skip AFI");
  add_tmp_flags(pipe_cmd, tf);
  pipe_cmd->add_option("--gamma", af.gamma, "minimum direction cosine, in (0,1)");
  pipe_cmd->add_option("--beta", af.beta, "coverage odds at zero distance");
  pipe_cmd->add_option("--s-dist", af.s_dist, "half-probability distance in meters");
  pipe_cmd->add_option("--lattice-m", af.lattice_m, "number of lattice directions");
  pipe_cmd->add_option("--knn", af.knn, "encoder neighbourhood size");
  pipe_cmd->add_option("--rates", af.rates, "per-layer keep ratios")->delimiter(',');
  pipe_cmd->add_flag("--no-coverage", af.no_coverage, "skip pseudo-label coverage sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return 1;
  }

  try {
    if (*synth_cmd) run_synth(p, synth_seed, synth_noise);
    if (*project_cmd) run_project(p);
    if (*pseudo_cmd) run_pseudo(p);
    if (*corr_cmd) run_corr(p);
    if (*tmp_cmd) run_tmp(p, tf);
    if (*afi_cmd) run_afi(p, af);
    if (*eval_cmd) run_eval(p);
    if (*render_cmd) run_render(p);
    if (*pipe_cmd) run_pipeline(p, af, tf, no_tmp, no_afi);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "spellnet/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "spellnet/checkpoint.hpp"
#include "spellnet/confusion.hpp"
#include "spellnet/error.hpp"
#include "spellnet/g2p.hpp"
#include "spellnet/m2.hpp"
#include "spellnet/nested_rnn.hpp"
#include "spellnet/perturb.hpp"
#include "spellnet/text.hpp"
#include "spellnet/vocab.hpp"

namespace spellnet {

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Shared config plumbing: an optional config file, a profile, then
// key=value overrides, applied in that order.
struct ConfigArgs {
  std::string config_path;
  std::string profile;
  std::vector<std::string> sets;
  bool seed_given = false;
  uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (key=value lines)");
    cmd->add_option("--profile", profile, "Profile: paper or desk");
    cmd->add_option("--set", sets, "Override a config key, e.g. --set batch_size=16");
    cmd->add_option("--seed", seed, "Random seed")->each([this](const std::string&) {
      seed_given = true;
    });
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = PipelineConfig::load(config_path);
    if (!profile.empty()) cfg.apply_profile(profile);
    for (const auto& kv : sets) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_given) cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

void log_header(std::ostream& err, const std::string& stage, const PipelineConfig& cfg,
                const std::vector<std::string>& inputs) {
  err << "[spellnet] " << stage << " config_fnv64=" << hex64(cfg.hash()) << " seed=" << cfg.seed
      << "\n";
  for (const auto& path : inputs)
    err << "[spellnet] input " << path << " fnv64=" << hex64(fnv1a64_file(path)) << "\n";
}

std::string format4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int run_train_g2p(const std::string& dict_path, const std::string& out_path,
                  const ConfigArgs& cargs, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = cargs.resolve();
  log_header(err, "train-g2p", cfg, {dict_path});
  PronunciationDictionary dict = load_dictionary(dict_path, cfg.g2p_strip_stress);
  if (dict.entries.empty()) throw DataError("train-g2p: dictionary has no entries");
  G2pTrainResult res = train_g2p(dict, cfg, &err);
  Checkpoint c = checkpoint_of(res.model, cfg, cfg.g2p_steps);
  save_checkpoint(out_path, c);
  out << "trained g2p on " << dict.entries.size() << " entries, wrote " << out_path << "\n";
  return 0;
}

int run_build_confusion(const std::string& model_path, const std::string& dict_path,
                        const std::string& out_path, double theta_override,
                        const ConfigArgs& cargs, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = cargs.resolve();
  if (theta_override > 0) cfg.theta_att = theta_override;
  cfg.validate();
  log_header(err, "build-confusion", cfg, {model_path, dict_path});
  Checkpoint c = load_checkpoint(model_path);
  G2pModel model = g2p_from_checkpoint(c);
  PronunciationDictionary dict =
      load_dictionary(dict_path, config_from_checkpoint(c).g2p_strip_stress);
  ConfusionMatrix m = build_confusion(model, dict, cfg.theta_att, fnv1a64_file(dict_path));
  m.save(out_path);
  long pairs = 0, off_diagonal = 0;
  for (const auto& [c1, row] : m.rows)
    for (const auto& [c2, v] : row) {
      ++pairs;
      if (c1 != c2) ++off_diagonal;
    }
  out << "confusion matrix: " << m.rows.size() << " units, " << pairs
      << " nonzero ordered pairs (" << off_diagonal << " off-diagonal), wrote " << out_path
      << "\n";
  return 0;
}

int run_perturb(const std::string& conf_path, const std::string& in_path,
                const std::string& out_path, double p_err_override, int max_errors,
                const ConfigArgs& cargs, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = cargs.resolve();
  if (p_err_override >= 0) cfg.p_err = p_err_override;
  if (max_errors > 0) cfg.max_errors_per_word = max_errors;
  cfg.validate();
  log_header(err, "perturb", cfg, {conf_path, in_path});
  ConfusionMatrix m = ConfusionMatrix::load(conf_path);
  PerturbConfig pc;
  pc.p_err = cfg.p_err;
  pc.seed = cfg.seed;
  pc.max_errors_per_word = cfg.max_errors_per_word;
  pc.allow_identity = cfg.allow_identity;
  Perturber perturber(m, pc);
  std::vector<std::string> lines = read_lines(in_path);
  std::vector<std::string> pairs;
  auto stats = perturber.perturb_corpus(lines, pairs);
  std::string joined;
  for (const auto& l : pairs) {
    joined += l;
    joined.push_back('\n');
  }
  atomic_write_file(out_path, joined);
  out << "perturbed " << stats.lines << " lines, " << stats.tokens << " tokens, changed "
      << stats.changed << " (" << format4(stats.tokens ? double(stats.changed) / stats.tokens : 0)
      << "), unmatchable " << stats.unmatchable << ", wrote " << out_path << "\n";
  return 0;
}

int run_build_vocab(const std::string& in_path, const std::string& words_path,
                    const std::string& chars_path, int word_limit, int char_limit,
                    const ConfigArgs& cargs, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = cargs.resolve();
  if (word_limit > 0) cfg.word_limit = word_limit;
  if (char_limit > 0) cfg.char_limit = char_limit;
  cfg.validate();
  log_header(err, "build-vocab", cfg, {in_path});
  CorpusVocabs v = build_vocab(read_lines(in_path), cfg.word_limit, cfg.char_limit);
  v.words.save(words_path);
  v.chars.save(chars_path);
  out << "vocab: " << v.words.size() << " words -> " << words_path << ", " << v.chars.size()
      << " chars -> " << chars_path << "\n";
  return 0;
}

int run_train(const std::string& pairs_path, const std::string& words_path,
              const std::string& chars_path, const std::string& dev_path,
              const std::string& out_path, bool keep_intermediate, const ConfigArgs& cargs,
              std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = cargs.resolve();
  std::vector<std::string> inputs = {pairs_path, words_path, chars_path};
  if (!dev_path.empty()) inputs.push_back(dev_path);
  log_header(err, "train", cfg, inputs);

  ParallelCorpus data = load_pairs_tsv(pairs_path);
  Vocabulary words = Vocabulary::load(words_path);
  Vocabulary chars = Vocabulary::load(chars_path);
  ParallelCorpus dev;
  if (!dev_path.empty()) dev = load_pairs_tsv(dev_path);

  std::function<void(NestedRnnModel&, long)> on_eval;
  if (keep_intermediate)
    on_eval = [&](NestedRnnModel& m, long step) {
      Checkpoint c = checkpoint_of(m, cfg, step);
      save_checkpoint(out_path + ".step" + std::to_string(step), c);
    };

  TrainResult res = train_corrector(data, words, chars, cfg, dev_path.empty() ? nullptr : &dev,
                                    &err, on_eval);
  Checkpoint c = checkpoint_of(res.model, cfg, res.best_step);
  save_checkpoint(out_path, c);
  out << "trained on " << data.size() << " pairs";
  if (res.best_dev_f05) out << ", best dev F0.5 " << format4(*res.best_dev_f05) << " at step "
                            << res.best_step;
  out << ", wrote " << out_path << "\n";
  return 0;
}

int run_correct(const std::string& model_path, const std::string& in_path,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  Checkpoint c = load_checkpoint(model_path);
  PipelineConfig cfg = config_from_checkpoint(c);
  log_header(err, "correct", cfg, {model_path, in_path});
  NestedRnnModel model = nested_from_checkpoint(c);
  std::vector<std::string> lines = read_lines(in_path);

  std::string result;
  const size_t chunk = 64;  // bound padding waste and memory
  for (size_t start = 0; start < lines.size(); start += chunk) {
    std::vector<std::vector<std::string>> batch;
    for (size_t i = start; i < std::min(lines.size(), start + chunk); ++i)
      batch.push_back(split_tokens(lines[i]));
    auto corrected = correct_batch(model, batch);
    for (const auto& toks : corrected) {
      result += join_tokens(toks);
      result.push_back('\n');
    }
  }
  atomic_write_file(out_path, result);
  out << "corrected " << lines.size() << " lines, wrote " << out_path << "\n";
  return 0;
}

int run_evaluate(const std::string& hyp_path, const std::string& src_path,
                 const std::string& gold_path, const std::string& ref_path,
                 const std::string& emit_path, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  std::vector<std::string> inputs = {hyp_path, src_path};
  if (!gold_path.empty()) inputs.push_back(gold_path);
  if (!ref_path.empty()) inputs.push_back(ref_path);
  log_header(err, "evaluate", cfg, inputs);

  const auto hyp_lines = read_lines(hyp_path);
  const auto src_lines = read_lines(src_path);
  if (hyp_lines.size() != src_lines.size())
    throw DataError("evaluate: hypothesis has " + std::to_string(hyp_lines.size()) +
                    " lines, source has " + std::to_string(src_lines.size()));

  std::vector<std::vector<std::string>> src_tokens;
  std::vector<std::vector<Edit>> hyp_edits;
  for (size_t i = 0; i < src_lines.size(); ++i) {
    src_tokens.push_back(split_tokens(src_lines[i]));
    hyp_edits.push_back(extract_edits(src_tokens.back(), split_tokens(hyp_lines[i])));
  }

  std::vector<std::vector<Edit>> gold_edits;
  std::vector<AnnotatedSentence> gold_blocks;
  if (!gold_path.empty()) {
    gold_blocks = parse_m2(read_file(gold_path));
    if (gold_blocks.size() != src_lines.size())
      throw DataError("evaluate: gold .m2 has " + std::to_string(gold_blocks.size()) +
                      " blocks, source has " + std::to_string(src_lines.size()) + " lines");
    for (size_t i = 0; i < gold_blocks.size(); ++i) {
      if (gold_blocks[i].tokens != src_tokens[i])
        throw DataError("evaluate: gold .m2 sentence " + std::to_string(i + 1) +
                        " does not match the source tokens");
      gold_edits.push_back(gold_blocks[i].edits(0));
    }
  } else if (!ref_path.empty()) {
    const auto ref_lines = read_lines(ref_path);
    if (ref_lines.size() != src_lines.size())
      throw DataError("evaluate: reference has " + std::to_string(ref_lines.size()) +
                      " lines, source has " + std::to_string(src_lines.size()));
    for (size_t i = 0; i < src_lines.size(); ++i)
      gold_edits.push_back(extract_edits(src_tokens[i], split_tokens(ref_lines[i])));
    if (!emit_path.empty()) {
      std::vector<AnnotatedSentence> blocks(src_lines.size());
      for (size_t i = 0; i < src_lines.size(); ++i) {
        blocks[i].tokens = src_tokens[i];
        blocks[i].annotations[0] = gold_edits[i];
        if (gold_edits[i].empty()) blocks[i].noop_annotators.insert(0);
      }
      atomic_write_file(emit_path, emit_m2(blocks));
      err << "[spellnet] wrote gold edits to " << emit_path << "\n";
    }
  } else {
    throw DataError("evaluate: provide --gold FILE.m2 or --ref FILE.txt");
  }

  ScoreReport rep = score_edits(hyp_edits, gold_edits);
  out << "TP=" << rep.tp << " FP=" << rep.fp << " FN=" << rep.fn << "\n";
  out << "P=" << format4(rep.p) << "\n";
  out << "R=" << format4(rep.r) << "\n";
  out << "F0.5=" << format4(rep.f05) << "\n";
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spellnet: spelling correction via a nested RNN trained on phonetic pseudo data"};
  app.require_subcommand(1);

  // train-g2p
  auto* g2p_cmd = app.add_subcommand("train-g2p", "Train the grapheme-to-phoneme model");
  std::string g2p_dict, g2p_out;
  ConfigArgs g2p_cfg;
  g2p_cmd->add_option("--dict", g2p_dict, "Pronunciation dictionary (WORD<TAB>PH1 PH2 ...)")
      ->required();
  g2p_cmd->add_option("--out", g2p_out, "Output checkpoint path")->required();
  g2p_cfg.attach(g2p_cmd);

  // build-confusion
  auto* conf_cmd = app.add_subcommand("build-confusion", "Extract the phonetic confusion matrix");
  std::string conf_model, conf_dict, conf_out;
  double conf_theta = -1;
  ConfigArgs conf_cfg;
  conf_cmd->add_option("--model", conf_model, "Trained g2p checkpoint")->required();
  conf_cmd->add_option("--dict", conf_dict, "Pronunciation dictionary")->required();
  conf_cmd->add_option("--out", conf_out, "Output TSV path")->required();
  conf_cmd->add_option("--theta", conf_theta, "Attention alignment threshold");
  conf_cfg.attach(conf_cmd);

  // perturb
  auto* pert_cmd = app.add_subcommand("perturb", "Corrupt a clean corpus into pseudo pairs");
  std::string pert_conf, pert_in, pert_out;
  double pert_perr = -1;
  int pert_max_errors = 0;
  ConfigArgs pert_cfg;
  pert_cmd->add_option("--confusion", pert_conf, "Confusion matrix TSV")->required();
  pert_cmd->add_option("--in", pert_in, "Clean tokenized corpus, one sentence per line")
      ->required();
  pert_cmd->add_option("--out", pert_out, "Output TSV of corrupted<TAB>clean")->required();
  pert_cmd->add_option("--p-err", pert_perr, "Per-word corruption probability");
  pert_cmd->add_option("--max-errors", pert_max_errors, "Max edits per selected word");
  pert_cfg.attach(pert_cmd);

  // build-vocab
  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build word and char vocabularies");
  std::string vocab_in, vocab_words, vocab_chars;
  int vocab_word_limit = 0, vocab_char_limit = 0;
  ConfigArgs vocab_cfg;
  vocab_cmd->add_option("--in", vocab_in, "Tokenized corpus")->required();
  vocab_cmd->add_option("--out-words", vocab_words, "Word vocabulary output")->required();
  vocab_cmd->add_option("--out-chars", vocab_chars, "Char vocabulary output")->required();
  vocab_cmd->add_option("--word-limit", vocab_word_limit, "Word vocabulary size limit");
  vocab_cmd->add_option("--char-limit", vocab_char_limit, "Char vocabulary size limit");
  vocab_cfg.attach(vocab_cmd);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the nested RNN corrector");
  std::string train_pairs, train_words, train_chars, train_dev, train_out;
  bool train_keep = false;
  ConfigArgs train_cfg;
  train_cmd->add_option("--pairs", train_pairs, "Training TSV of corrupted<TAB>clean")
      ->required();
  train_cmd->add_option("--words", train_words, "Word vocabulary")->required();
  train_cmd->add_option("--chars", train_chars, "Char vocabulary")->required();
  train_cmd->add_option("--dev", train_dev, "Dev TSV for best-checkpoint selection");
  train_cmd->add_option("--out", train_out, "Output checkpoint path")->required();
  train_cmd->add_flag("--keep-intermediate", train_keep, "Also save a checkpoint per eval");
  train_cfg.attach(train_cmd);

  // correct
  auto* corr_cmd = app.add_subcommand("correct", "Correct a tokenized corpus");
  std::string corr_model, corr_in, corr_out;
  corr_cmd->add_option("--model", corr_model, "Trained corrector checkpoint")->required();
  corr_cmd->add_option("--in", corr_in, "Input corpus")->required();
  corr_cmd->add_option("--out", corr_out, "Corrected output path")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score corrections (P, R, F0.5)");
  std::string eval_hyp, eval_src, eval_gold, eval_ref, eval_emit;
  eval_cmd->add_option("--hyp", eval_hyp, "Hypothesis corpus")->required();
  eval_cmd->add_option("--src", eval_src, "Source (uncorrected) corpus")->required();
  eval_cmd->add_option("--gold", eval_gold, "Gold edits in .m2 format");
  eval_cmd->add_option("--ref", eval_ref, "Reference corpus (gold edits derived by alignment)");
  eval_cmd->add_option("--emit-m2", eval_emit, "With --ref: also write the derived gold .m2");

  try {
    std::vector<const char*> cargv;
    cargv.push_back("spellnet");
    for (const auto& a : args) cargv.push_back(a.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());

    if (*g2p_cmd) return run_train_g2p(g2p_dict, g2p_out, g2p_cfg, out, err);
    if (*conf_cmd)
      return run_build_confusion(conf_model, conf_dict, conf_out, conf_theta, conf_cfg, out, err);
    if (*pert_cmd)
      return run_perturb(pert_conf, pert_in, pert_out, pert_perr, pert_max_errors, pert_cfg, out,
                         err);
    if (*vocab_cmd)
      return run_build_vocab(vocab_in, vocab_words, vocab_chars, vocab_word_limit,
                             vocab_char_limit, vocab_cfg, out, err);
    if (*train_cmd)
      return run_train(train_pairs, train_words, train_chars, train_dev, train_out, train_keep,
                       train_cfg, out, err);
    if (*corr_cmd) return run_correct(corr_model, corr_in, corr_out, out, err);
    if (*eval_cmd)
      return run_evaluate(eval_hyp, eval_src, eval_gold, eval_ref, eval_emit, out, err);
    err << "spellnet: no subcommand given\n";
    return 1;
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace spellnet

// Generates a synthetic pronunciation dictionary and clean corpora so the
// full pipeline can be exercised without external data.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "spellnet/synth.hpp"
#include "spellnet/text.hpp"

using namespace spellnet;

int main(int argc, char** argv) {
  CLI::App app{"make_toy_data: synthetic dictionary and corpora for spellnet"};
  std::string out_dir = "toy";
  int words = 800;
  int train_sents = 10000;
  int dev_sents = 500;
  int test_sents = 500;
  uint64_t seed = 1;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--words", words, "Dictionary size");
  app.add_option("--train", train_sents, "Training sentences");
  app.add_option("--dev", dev_sents, "Dev sentences");
  app.add_option("--test", test_sents, "Test sentences");
  app.add_option("--seed", seed, "Random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    const auto lang = synth::homophone_language();
    synth::DictOptions dopt;
    dopt.num_words = words;
    dopt.seed = seed;
    const auto dict = synth::make_dictionary(lang, dopt);
    atomic_write_file(out_dir + "/dict.tsv", serialize_dictionary(dict));

    const auto vocab = synth::dictionary_words(dict);
    auto write_corpus = [&](const std::string& name, int n, uint64_t sub) {
      synth::CorpusOptions copt;
      copt.num_sentences = n;
      copt.seed = mix_seed(seed, sub);
      std::string text;
      for (const auto& line : synth::make_corpus(vocab, copt)) text += line + "\n";
      atomic_write_file(out_dir + "/" + name, text);
    };
    write_corpus("train.txt", train_sents, 1);
    write_corpus("dev.txt", dev_sents, 2);
    write_corpus("test.txt", test_sents, 3);

    std::cout << "wrote " << out_dir << "/dict.tsv (" << dict.entries.size() << " entries), "
              << "train.txt, dev.txt, test.txt\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

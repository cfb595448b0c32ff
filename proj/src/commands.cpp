#include "mpc/commands.hpp"

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mpc/bench.hpp"
#include "mpc/competition.hpp"
#include "mpc/container.hpp"
#include "mpc/errors.hpp"
#include "mpc/model_io.hpp"
#include "mpc/pipeline.hpp"
#include "mpc/sha256.hpp"
#include "mpc/sources.hpp"
#include "mpc/transform.hpp"

namespace mpc {
namespace {

struct TrainArgs {
  std::string spec_path;
  std::vector<std::string> images;
  std::string out_prefix;
  int n_cdf = 64;
  double delta = 0.1;
  int64_t steps = 20000;
  int crop = 0;
  uint64_t seed = 0;
  double lr = 1e-3;
  int64_t val_interval = 2500;
};

struct TrainData {
  std::unique_ptr<LatentSource> source;
  std::vector<QuantizedLatent> val;
  SymbolAlphabet alphabet{-8, 8};
  int c_l = 0;
};

TrainData prepare_train_data(const TrainArgs& args) {
  TrainData data;
  if (!args.spec_path.empty()) {
    SyntheticSourceSpec spec = load_source_spec(args.spec_path);
    data.alphabet = spec.support_alphabet(2);
    data.c_l = spec.c_l;
    Rng val_rng(args.seed ^ 0x9e3779b97f4a7c15ull);
    for (int i = 0; i < 4; ++i)
      data.val.push_back(sample_synthetic(spec, val_rng).latent);
    data.source = std::make_unique<SyntheticLatentSource>(std::move(spec));
    return data;
  }
  if (args.images.empty())
    throw UsageError("train needs --spec or at least one --image");
  std::vector<QuantizedLatent> latents;
  for (const std::string& path : args.images) {
    ImageF img = read_pnm(path);
    if (img.planes != 1) img = to_luma(img);
    latents.push_back(quantize(analyze(img, 0), args.delta));
  }
  data.alphabet = observed_alphabet(latents, 2);
  data.c_l = latents.front().c_l;
  data.val = latents;
  if (data.val.size() > 4) data.val.resize(4);
  if (args.crop > 0) {
    data.source = std::make_unique<CropLatentSource>(std::move(latents.front()),
                                                     args.crop, args.crop);
  } else {
    data.source = std::make_unique<FixedLatentSource>(std::move(latents));
  }
  return data;
}

int cmd_train(const TrainArgs& args) {
  TrainData data = prepare_train_data(args);

  MonotoneCdfStackd stack = MonotoneCdfStackd::init_spread(
      args.n_cdf, data.c_l, data.alphabet, args.seed);
  TrainerConfig cfg;
  cfg.lr = args.lr;
  cfg.seed = args.seed;
  cfg.val_interval = args.val_interval;
  Trainer trainer(std::move(stack), cfg);
  TrainResult result = trainer.fit(*data.source, args.steps, data.val);

  CdfTableSet tables = freeze(result.best_params, data.alphabet);
  save_cpm(args.out_prefix + ".mpcpm", result.best_params, data.alphabet);
  save_tables(args.out_prefix + ".mpcdf", tables);
  const std::string report = format_report(result.rows);
  write_file(args.out_prefix + "_report.tsv",
             std::span(reinterpret_cast<const uint8_t*>(report.data()),
                       report.size()));

  const auto hash = sha256(serialize_tables(tables));
  std::cout << "trained " << args.n_cdf << " priors on " << data.c_l
            << " channels, alphabet [" << data.alphabet.y_min << ", "
            << data.alphabet.y_max << "]\n"
            << "best validation rate: " << result.best_val_rate
            << " bits/symbol\n"
            << "revivals: " << result.revivals
            << ", max idle gap: " << result.max_unused_gap << " steps\n"
            << "model hash: " << hex_digest(hash) << "\n"
            << "wrote " << args.out_prefix << ".mpcpm, " << args.out_prefix
            << ".mpcdf, " << args.out_prefix << "_report.tsv\n";
  return 0;
}

PlanePolicy parse_planes(const std::string& name) {
  if (name == "luma") return PlanePolicy::kLuma;
  if (name == "rgb") return PlanePolicy::kPlanes;
  throw UsageError("unknown plane mode '" + name + "' (use luma or rgb)");
}

void print_breakdown(const char* label, const StageBreakdown& t) {
  std::printf(
      "%s: total %.3f ms (transform %.3f, prior-select %.3f, cdf-gather %.3f, "
      "entropy-code %.3f)\n",
      label, t.total_ms, t.transform_ms, t.prior_select_ms, t.cdf_gather_ms,
      t.entropy_code_ms);
}

void print_lookups(const LookupReport& r) {
  std::printf(
      "lookups: index %llu, encode gathers %llu, decode gathers %llu, "
      "per-variable baseline %llu (decode ratio %.6f)\n",
      static_cast<unsigned long long>(r.encode_index_lookups),
      static_cast<unsigned long long>(r.encode_cdf_gathers),
      static_cast<unsigned long long>(r.decode_cdf_gathers),
      static_cast<unsigned long long>(r.hp_equivalent_cdf_evals),
      r.decode_gather_ratio());
}

int cmd_encode(const std::string& image_path, const std::string& model_path,
               const std::string& out_path, double delta,
               const std::string& planes, const std::string& segmap_path) {
  CodecModel model = load_codec_model(model_path);
  ImageF img = read_pnm(image_path);
  EncodeConfig cfg;
  cfg.delta = delta;
  cfg.planes = parse_planes(planes);
  EncodeOutcome out = encode_image(img, model, cfg);
  write_file(out_path, out.stream);

  LookupReport lookups = report_from_counters(out.counters, model.tables.c_l());
  std::printf("encoded %dx%d -> %zu bytes\n", img.h, img.w, out.stream.size());
  std::printf("rate: %.4f bpp (side info %.4f bpp), psnr %.2f dB\n", out.bpp,
              out.side_bpp, out.psnr_db);
  if (out.clamped > 0)
    std::printf("warning: %zu symbols clipped into the alphabet\n",
                out.clamped);
  print_breakdown("encode", out.timings);
  print_lookups(lookups);
  if (!segmap_path.empty())
    write_segmentation_ppm(segmap_path, out.map, model.tables.n_cdf());
  return 0;
}

int cmd_decode(const std::string& stream_path, const std::string& model_path,
               const std::string& out_path) {
  CodecModel model = load_codec_model(model_path);
  DecodeOutcome out = decode_image(read_file(stream_path), model);
  write_pnm(out_path, out.image);
  std::printf("decoded %ux%u (%s)\n", out.header.image_h, out.header.image_w,
              out.header.planes == PlanePolicy::kLuma ? "luma" : "rgb");
  print_breakdown("decode", out.timings);
  return 0;
}

int cmd_bench(const std::vector<std::string>& images,
              const std::string& model_path, int runs, double delta,
              const std::string& planes, const std::string& out_path) {
  if (runs <= 0) throw UsageError("--runs must be positive");
  CodecModel model = load_codec_model(model_path);
  EncodeConfig cfg;
  cfg.delta = delta;
  cfg.planes = parse_planes(planes);
  std::vector<BenchRow> rows;
  for (const std::string& path : images) {
    ImageF img = read_pnm(path);
    BenchRow row;
    row.name = path;
    row.image_h = img.h;
    row.image_w = img.w;
    row.n_cdf = model.tables.n_cdf();
    for (int r = 0; r < runs; ++r) {
      EncodeOutcome enc = encode_image(img, model, cfg);
      DecodeOutcome dec = decode_image(enc.stream, model);
      if (dec.image.v != enc.recon.v)
        throw NumericError("decode does not match the encoder reconstruction");
      if (r == 0) {
        row.bpp = enc.bpp;
        row.side_bpp = enc.side_bpp;
        row.psnr_db = enc.psnr_db;
        row.lookups = report_from_counters(enc.counters, model.tables.c_l());
      }
      row.encode += enc.timings;
      row.decode += dec.timings;
    }
    row.encode.scale(1.0 / runs);
    row.decode.scale(1.0 / runs);
    rows.push_back(std::move(row));
  }
  const std::string csv = format_bench_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, std::span(reinterpret_cast<const uint8_t*>(csv.data()),
                                   csv.size()));
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_segmap(const std::string& stream_path, const std::string& model_path,
               const std::string& out_path) {
  CodecModel model = load_codec_model(model_path);
  DecodeOutcome out = decode_image(read_file(stream_path), model);
  write_segmentation_ppm(out_path, out.map, model.tables.n_cdf());
  std::printf("wrote %s (%dx%d blocks, %d priors)\n", out_path.c_str(),
              out.map.h_l, out.map.w_l, model.tables.n_cdf());
  return 0;
}

int cmd_inspect(const std::string& stream_path, const std::string& model_path) {
  if (!stream_path.empty()) {
    ParsedStream parsed = read_stream(read_file(stream_path));
    const StreamHeader& h = parsed.header;
    std::printf("coded latent stream, version %u\n", h.version);
    std::printf("image: %ux%u, %s\n", h.image_h, h.image_w,
                h.planes == PlanePolicy::kLuma ? "luma" : "rgb");
    std::printf("delta: %g\n", static_cast<double>(h.delta));
    std::printf("priors: %u, channels: %u, alphabet [%d, %d]\n", h.n_cdf,
                h.c_l, h.y_min, h.y_max);
    std::printf("model hash: %s\n", hex_digest(h.model_hash).c_str());
    std::printf("index section: %zu bytes, payload: %zu bytes\n",
                parsed.index_section.size(), parsed.payload.size());
  }
  if (!model_path.empty()) {
    CodecModel model = load_codec_model(model_path);
    std::printf("table set: %d priors x %d channels, alphabet [%d, %d]\n",
                model.tables.n_cdf(), model.tables.c_l(),
                model.tables.alphabet().y_min, model.tables.alphabet().y_max);
    std::printf("model hash: %s\n", hex_digest(model.hash).c_str());
  }
  if (stream_path.empty() && model_path.empty())
    throw UsageError("inspect needs --stream or --model");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multi-prior latent codec"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* sub_train = app.add_subcommand(
      "train", "fit competing priors and freeze their tables");
  sub_train->add_option("--spec", train.spec_path,
                "JSON description of a synthetic source");
  sub_train->add_option("--image", train.images, "training image (repeatable)");
  sub_train->add_option("--out", train.out_prefix, "output path prefix")->required();
  sub_train->add_option("--n-cdf", train.n_cdf, "number of competing priors")
      ->check(CLI::Range(1, 32768));
  sub_train->add_option("--delta", train.delta, "quantizer step for image latents")
      ->check(CLI::PositiveNumber);
  sub_train->add_option("--steps", train.steps, "training steps")
      ->check(CLI::PositiveNumber);
  sub_train->add_option("--crop", train.crop,
                "train on random square crops of this latent size");
  sub_train->add_option("--seed", train.seed, "deterministic seed");
  sub_train->add_option("--lr", train.lr, "initial learning rate")
      ->check(CLI::PositiveNumber);
  sub_train->add_option("--val-interval", train.val_interval,
                "steps between validations")
      ->check(CLI::PositiveNumber);

  std::string enc_image, enc_model, enc_out, enc_planes = "luma",
                                             enc_segmap;
  double enc_delta = 0.1;
  CLI::App* sub_encode = app.add_subcommand("encode", "compress an image");
  sub_encode->add_option("--image", enc_image, "input image (.pgm or .ppm)")
      ->required();
  sub_encode->add_option("--model", enc_model, "frozen table file (.mpcdf)")
      ->required();
  sub_encode->add_option("--out", enc_out, "output stream path")->required();
  sub_encode->add_option("--delta", enc_delta, "quantizer step")
      ->check(CLI::PositiveNumber);
  sub_encode->add_option("--planes", enc_planes, "luma or rgb");
  sub_encode->add_option("--segmap", enc_segmap,
                "also write the prior segmentation map here");

  std::string dec_stream, dec_model, dec_out;
  CLI::App* sub_decode = app.add_subcommand("decode", "decompress a stream");
  sub_decode->add_option("--stream", dec_stream, "input stream path")->required();
  sub_decode->add_option("--model", dec_model, "frozen table file (.mpcdf)")
      ->required();
  sub_decode->add_option("--out", dec_out, "output image path")->required();

  std::vector<std::string> bench_images;
  std::string bench_model, bench_out, bench_planes = "luma";
  int bench_runs = 50;
  double bench_delta = 0.1;
  CLI::App* sub_bench = app.add_subcommand("bench", "timed encode/decode report");
  sub_bench->add_option("--image", bench_images, "benchmark image (repeatable)")
      ->required();
  sub_bench->add_option("--model", bench_model, "frozen table file (.mpcdf)")
      ->required();
  sub_bench->add_option("--runs", bench_runs, "timed repetitions per image");
  sub_bench->add_option("--delta", bench_delta, "quantizer step")
      ->check(CLI::PositiveNumber);
  sub_bench->add_option("--planes", bench_planes, "luma or rgb");
  sub_bench->add_option("--out", bench_out, "CSV output path (default stdout)");

  std::string seg_stream, seg_model, seg_out;
  CLI::App* sub_segmap = app.add_subcommand(
      "segmap", "render which prior coded each latent location");
  sub_segmap->add_option("--stream", seg_stream, "input stream path")->required();
  sub_segmap->add_option("--model", seg_model, "frozen table file (.mpcdf)")
      ->required();
  sub_segmap->add_option("--out", seg_out, "output .ppm path")->required();

  std::string ins_stream, ins_model;
  CLI::App* sub_inspect = app.add_subcommand("inspect", "describe a stream or model");
  sub_inspect->add_option("--stream", ins_stream, "stream path");
  sub_inspect->add_option("--model", ins_model, "model path");

  try {
    app.parse(argc, argv);
    if (sub_train->parsed()) return cmd_train(train);
    if (sub_encode->parsed())
      return cmd_encode(enc_image, enc_model, enc_out, enc_delta, enc_planes,
                        enc_segmap);
    if (sub_decode->parsed()) return cmd_decode(dec_stream, dec_model, dec_out);
    if (sub_bench->parsed())
      return cmd_bench(bench_images, bench_model, bench_runs, bench_delta,
                       bench_planes, bench_out);
    if (sub_segmap->parsed()) return cmd_segmap(seg_stream, seg_model, seg_out);
    if (sub_inspect->parsed()) return cmd_inspect(ins_stream, ins_model);
    throw UsageError("no subcommand selected");
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mpc

// voxbox - box-cover compression of voxelized vector fields, plus generators
// for the hardness-reduction instance families.
//
// Exit codes: 0 success, 1 validation failure, 2 solver failure, 3 I/O error.

#include "voxbox/engine.hpp"
#include "voxbox/reductions.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace voxbox;

namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("VOXBOX_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

Rat parse_eps(const std::string& text) {
    Rat eps = parse_rational(text);
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0,1)");
    return eps;
}

PiecewisePolynomial load_poly(const std::string& path, unsigned dim) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return PiecewisePolynomial::parse(ss.str(), dim);
}

void print_stats(const CompressionResult& res) {
    std::cout << "entries=" << res.stats.entries << '\n'
              << "bit_length=" << res.stats.bit_length << '\n'
              << "field_bits=" << res.stats.field_bits << '\n'
              << "ratio=" << rat_to_string(res.ratio) << '\n'
              << "eps_star=" << rat_to_string(res.stats.eps_star) << '\n'
              << "seconds=" << res.stats.seconds << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"box-cover compression of voxelized vector fields"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    unsigned threads = default_threads();
    app.add_option("--threads", threads, "worker threads for energy evaluation");

    // ---- compress ----
    auto* cmd_compress = app.add_subcommand("compress", "compress a .vvf field");
    std::string c_field, c_poly, c_poly_inline, c_eps, c_out = "out.vbx", c_mode = "greedy";
    std::uint64_t c_budget = 24;
    cmd_compress->add_option("--field", c_field, ".vvf input")->required();
    auto* poly_file = cmd_compress->add_option("--poly", c_poly, ".poly objective file");
    auto* poly_text = cmd_compress->add_option("--poly-inline", c_poly_inline,
                                               "objective given directly on the command line");
    poly_file->excludes(poly_text);
    cmd_compress->add_option("--eps", c_eps, "error bound in (0,1), exact rational")->required();
    cmd_compress->add_option("--mode", c_mode, "greedy|exact")
        ->check(CLI::IsMember({"greedy", "exact"}));
    cmd_compress->add_option("--budget", c_budget, "voxel cap for exact mode");
    cmd_compress->add_option("--out", c_out, ".vbx output");

    // ---- decompress ----
    auto* cmd_decompress = app.add_subcommand("decompress", "reconstruct a field from a .vbx");
    std::string d_code, d_out = "recon.vvf", d_verify_field, d_verify_poly, d_verify_eps;
    cmd_decompress->add_option("--code", d_code, ".vbx input")->required();
    cmd_decompress->add_option("--out", d_out, ".vvf output");
    cmd_decompress->add_option("--verify", d_verify_field,
                               "original .vvf; fail on any index-consistency violation");

    // ---- gen ----
    auto* cmd_gen = app.add_subcommand("gen", "generate reduction instances");
    auto* gen_np = cmd_gen->add_subcommand("np-matrix", "0-1 matrix hardness instance");
    bool np_fig3 = false;
    Index np_m = 5;
    std::uint64_t np_kprime = 1, np_seed = 1;
    std::string np_prefix = "np";
    gen_np->add_flag("--fig3", np_fig3, "use the 5x5 demonstration polyomino");
    gen_np->add_option("--m", np_m, "matrix side for random instances");
    gen_np->add_option("--kprime", np_kprime, "rectangle budget K'");
    gen_np->add_option("--seed", np_seed, "random seed");
    gen_np->add_option("--prefix", np_prefix, "output prefix (<prefix>.vvf/.poly)");

    auto* gen_s3 = cmd_gen->add_subcommand("special3sc", "Special-3SC set system");
    Index s3_m = 2;
    std::uint64_t s3_seed = 1;
    std::string s3_out = "inst.s3sc";
    gen_s3->add_option("--m", s3_m, "number of quintuple groups (even)")->required();
    gen_s3->add_option("--seed", s3_seed, "random seed");
    gen_s3->add_option("--out", s3_out, ".s3sc output");

    auto* gen_vgrid = cmd_gen->add_subcommand("vgrid", "embed a .s3sc instance on [2N]^2");
    std::string vg_in, vg_out = "inst.rs";
    gen_vgrid->add_option("--s3sc", vg_in, ".s3sc input")->required();
    gen_vgrid->add_option("--out", vg_out, "RangeSpace output");

    auto* gen_apx = cmd_gen->add_subcommand("apx", "compression instance of a vgrid embedding");
    std::string apx_in, apx_prefix = "apx";
    gen_apx->add_option("--s3sc", apx_in, ".s3sc input")->required();
    gen_apx->add_option("--prefix", apx_prefix, "output prefix (<prefix>.vvf/.poly)");

    // ---- cover-complement ----
    auto* cmd_cover = app.add_subcommand("cover-complement",
                                         "cover the complement of a RangeSpace by boxes");
    std::string cc_in, cc_out = "complement.rs";
    cmd_cover->add_option("--space", cc_in, "RangeSpace input")->required();
    cmd_cover->add_option("--out", cc_out, "RangeSpace output");

    CLI11_PARSE(app, argc, argv);

    if (*cmd_compress) {
        VoxelField field = VoxelField::load_file(c_field);
        if (c_poly.empty() && c_poly_inline.empty())
            throw std::invalid_argument("one of --poly / --poly-inline is required");
        PiecewisePolynomial f = c_poly.empty()
                                    ? PiecewisePolynomial::parse(c_poly_inline, field.d())
                                    : load_poly(c_poly, field.d());
        Rat eps = parse_eps(c_eps);
        CompressionResult res = (c_mode == "exact")
                                    ? compress_exact(field, f, eps, c_budget)
                                    : compress_greedy(field, f, eps, threads);
        save_vbx(res.codeword, c_out);
        print_stats(res);
        return 0;
    }
    if (*cmd_decompress) {
        Codeword cw = load_vbx(d_code);
        Reconstruction rec = decompress(cw);
        rec.field_hat.save_file(d_out);
        std::cout << "voxels=" << rec.field_hat.n() << '\n';
        if (!d_verify_field.empty()) {
            VoxelField orig = VoxelField::load_file(d_verify_field);
            BoxCoverSummaries payload = deserialize(cw);
            auto bad = verify_index_consistency(orig, rec, payload.f, payload.eps);
            auto loose = summary_violations(payload, orig);  // eps* re-check per covered voxel
            std::cout << "violations=" << bad.size() << '\n'
                      << "summary_violations=" << loose.size() << '\n';
            if (!bad.empty() || !loose.empty()) return 1;
        }
        return 0;
    }
    if (*gen_np) {
        BinaryMatrix M;
        if (np_fig3) {
            M = fig3_matrix();
        } else {
            M.m = np_m;
            std::mt19937_64 rng(np_seed);
            for (Index i = 0; i < np_m * np_m; ++i)
                M.cells.push_back(static_cast<std::uint8_t>(rng() % 2));
        }
        NpInstance inst = build_np_instance(M, np_kprime);
        inst.field.save_file(np_prefix + ".vvf");
        std::ofstream os(np_prefix + ".poly");
        os << inst.f.source() << '\n';
        std::cout << "n=" << inst.field.n() << '\n'
                  << "nnz=" << M.nnz() << '\n'
                  << "eps=" << rat_to_string(inst.eps) << '\n'
                  << "K=" << inst.K << '\n';
        return 0;
    }
    if (*gen_s3) {
        Special3SC inst = gen_special3sc(s3_m, s3_seed);
        std::ofstream os(s3_out);
        if (!os) throw std::runtime_error("cannot open for writing: " + s3_out);
        inst.save(os);
        std::cout << "n=" << inst.n << '\n' << "m=" << inst.m << '\n'
                  << "sets=" << 5 * inst.m << '\n';
        return 0;
    }
    if (*gen_vgrid) {
        std::ifstream is(vg_in);
        if (!is) throw std::runtime_error("cannot open: " + vg_in);
        Special3SC inst = Special3SC::load(is);
        PhiEmbedding emb = phi_embed(inst);
        ValidationReport rep = validate_phi_embedding(inst, emb);
        if (!rep.ok()) {
            std::cerr << "embedding check failed: " << rep.issues[0] << '\n';
            return 1;
        }
        VGridInstance vg = build_vgrid_instance(emb);
        RangeSpace rs;
        rs.k = 2;
        rs.q = vg.q;
        rs.boxes = vg.boxes;
        rs.save_file(vg_out);
        std::cout << "q=" << vg.q << '\n'
                  << "r_boxes=" << vg.r_count() << '\n'
                  << "h_boxes=" << vg.h_count() << '\n'
                  << "geometry=hook-lane-chain\n";  // one admissible coordinate choice
        return 0;
    }
    if (*gen_apx) {
        std::ifstream is(apx_in);
        if (!is) throw std::runtime_error("cannot open: " + apx_in);
        Special3SC inst = Special3SC::load(is);
        VGridInstance vg = build_vgrid_instance(phi_embed(inst));
        ApxInstance apx = build_apx_instance(vg);
        apx.field.save_file(apx_prefix + ".vvf");
        std::ofstream os(apx_prefix + ".poly");
        os << apx.f.source() << '\n';
        std::cout << "q=" << vg.q << '\n'
                  << "eps=" << rat_to_string(apx.eps) << '\n';
        return 0;
    }
    if (*cmd_cover) {
        RangeSpace rs = RangeSpace::load_file(cc_in);
        std::vector<Box> H = cover_complement(rs);
        RangeSpace out;
        out.k = rs.k;
        out.q = rs.q;
        out.boxes = H;
        out.save_file(cc_out);
        // pixel-oracle verification summary
        std::vector<char> covered(static_cast<std::size_t>(rs.q * rs.q), 0);
        for (const Box& b : rs.boxes)
            for (const VoxelCoord& v : box_points(b))
                covered[static_cast<std::size_t>((v.c[0] - 1) * rs.q + (v.c[1] - 1))] = 1;
        std::uint64_t complement = 0, hit = 0;
        std::vector<char> got(covered.size(), 0);
        for (const Box& b : H)
            for (const VoxelCoord& v : box_points(b))
                got[static_cast<std::size_t>((v.c[0] - 1) * rs.q + (v.c[1] - 1))] = 1;
        bool exact = true;
        for (std::size_t i = 0; i < covered.size(); ++i) {
            if (!covered[i]) {
                ++complement;
                if (got[i]) ++hit;
                else exact = false;
            } else if (got[i]) {
                exact = false;
            }
        }
        std::cout << "count=" << H.size() << '\n'
                  << "bound=" << 4 * rs.boxes.size() << '\n'
                  << "complement_cells=" << complement << '\n'
                  << "covered_cells=" << hit << '\n'
                  << "exact=" << (exact ? 1 : 0) << '\n';
        if (!exact) return 1;
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const CodecError& e) {
        std::cerr << "codec error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << '\n';
        return msg.find("cannot open") != std::string::npos ||
                       msg.find("malformed .v") != std::string::npos
                   ? 3
                   : 1;
    }
}

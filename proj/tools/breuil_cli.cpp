// Exact-arithmetic CLI for tame potentially Barsotti-Tate reductions:
// strongly divisible lattices, their Breuil-module reductions, the
// classification sweeps, and the deformation-ring lookup.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "breuil/json_io.hpp"

using namespace breuil;

namespace {

struct ValUnit {
    long num = 0, den = 1; // valuation
    long unit = 1;
    bool is_zero = false;
};

// accepts "val=1/2,unit=3", "val=1", or a plain integer "12"
ValUnit parse_valunit(const std::string& s) {
    ValUnit v;
    if (s.find("val=") == std::string::npos) {
        long n = std::stol(s);
        if (n == 0) {
            v.is_zero = true;
            return v;
        }
        v.num = 0;
        v.unit = n;
        return v;
    }
    std::string rest = s;
    auto grab = [&](const std::string& key) -> std::string {
        auto pos = rest.find(key);
        if (pos == std::string::npos) return "";
        auto end = rest.find(',', pos);
        return rest.substr(pos + key.size(), end == std::string::npos ? std::string::npos : end - pos - key.size());
    };
    std::string val = grab("val=");
    std::string unit = grab("unit=");
    auto slash = val.find('/');
    v.num = std::stol(val.substr(0, slash));
    v.den = slash == std::string::npos ? 1 : std::stol(val.substr(slash + 1));
    v.unit = unit.empty() ? 1 : std::stol(unit);
    return v;
}

OE make_oe(PadicCtxP R, const ValUnit& v) {
    if (v.is_zero) return OE::zero(R);
    // unit part times p^(num/den)
    OE u = OE::from_int(R, v.unit);
    if (v.num == 0 && v.den == 1) return u;
    if (!u.is_unit()) {
        // plain integer with its own valuation plus a shift is ambiguous
        throw inadmissible_parameters("unit part of a val=... parameter must be a p-adic unit");
    }
    return OE::with_valuation(R, v.num, v.den, u);
}

int exit_code_of(const std::exception& e) {
    if (dynamic_cast<const precision_exhausted*>(&e)) return 3;
    if (dynamic_cast<const inadmissible_parameters*>(&e)) return 2;
    if (dynamic_cast<const no_root_in_E*>(&e)) return 2;
    if (dynamic_cast<const not_divisible*>(&e)) return 2;
    if (dynamic_cast<const not_recognized*>(&e)) return 2;
    if (dynamic_cast<const unsupported_map*>(&e)) return 2;
    return 1;
}

TameType parse_tau(long p, const std::string& s) {
    TameType t;
    t.p = p;
    if (s.rfind("prin:", 0) == 0) {
        auto rest = s.substr(5);
        auto comma = rest.find(',');
        t.niveau = 1;
        t.i = std::stol(rest.substr(0, comma));
        t.j = std::stol(rest.substr(comma + 1));
    } else if (s.rfind("super:", 0) == 0) {
        t.niveau = 2;
        t.m = std::stol(s.substr(6));
    } else {
        throw CLI::ValidationError("--tau expects prin:i,j or super:m");
    }
    return t;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations with strongly divisible lattices and their reductions"};
    app.require_subcommand(1);

    long p = 3;
    int prec = 10;
    int umax = -1;
    int eE = 1, fE = 2;
    app.add_option("--p", p, "odd prime")->required();
    app.add_option("--prec", prec, "working p-adic precision (digits)");
    app.add_option("--umax", umax, "series truncation degree (default 3ep)");
    app.add_option("--eE", eE, "Eisenstein degree of O_E (1 or 2)");
    app.add_option("--fE", fE, "residue degree of k_E (1 or 2)");
    if (const char* env = std::getenv("BREUIL_PRECISION")) prec = std::atoi(env);

    // solve-element
    auto* se = app.add_subcommand("solve-element", "solve a fixed-point series of S_{F,R}");
    std::string se_kind, se_x = "0", se_b = "0", se_w = "1", se_family = "none";
    long se_j = 1, se_i = 1;
    int se_branch = 1, se_family_r = 2;
    se->add_option("--kind", se_kind, "V|U|Vp|Up|W|X")->required();
    se->add_option("--x", se_x, "x parameter (integer or val=a/b,unit=c)");
    se->add_option("--b", se_b, "b parameter");
    se->add_option("--w", se_w, "w parameter (unit)");
    se->add_option("--j", se_j, "j parameter (V/U)");
    se->add_option("--i", se_i, "i parameter (W)");
    se->add_option("--branch", se_branch, "root branch (+1/-1)");
    se->add_option("--family", se_family, "none|Y|B|X1X2");
    se->add_option("--family-r", se_family_r, "family truncation degree");

    // wadm
    auto* wa = app.add_subcommand("wadm", "weak admissibility report for a filtered module");
    std::string wa_variant = "prin", wa_x1 = "1", wa_x2, wa_b = "1", wa_a = "1", wa_x;
    long wa_i = 0, wa_j = 1, wa_m = 1;
    wa->add_option("--variant", wa_variant, "prin|prin2|super");
    wa->add_option("--x1", wa_x1);
    wa->add_option("--x2", wa_x2);
    wa->add_option("--i", wa_i);
    wa->add_option("--j", wa_j);
    wa->add_option("--m", wa_m);
    wa->add_option("--a", wa_a);
    wa->add_option("--b", wa_b);
    wa->add_option("--x", wa_x);

    // build-sdm / verify-sdm
    auto* bs = app.add_subcommand("build-sdm", "construct a strongly divisible lattice");
    auto* vs = app.add_subcommand("verify-sdm", "construct and verify a strongly divisible lattice");
    std::string sv_variant, sv_x1 = "1", sv_x2, sv_b = "0", sv_w = "1", sv_a = "1";
    long sv_j = 1, sv_m = 1, sv_exp = 0;
    int sv_branch = 1, sv_family_r = 0;
    for (auto* cmd : {bs, vs}) {
        cmd->add_option("--variant", sv_variant,
                        "char_F1|char_F2_niv1|char_F2_niv2|prin_case1|prin_case2|prin_case3|super_general|super_i1|"
                        "family_Y1|family_Y2|family_X1X2|family_B|family_Bprime|family_X")
            ->required();
        cmd->add_option("--x1", sv_x1);
        cmd->add_option("--x2", sv_x2);
        cmd->add_option("--b", sv_b);
        cmd->add_option("--w", sv_w);
        cmd->add_option("--a", sv_a);
        cmd->add_option("--j", sv_j);
        cmd->add_option("--m", sv_m);
        cmd->add_option("--exp", sv_exp);
        cmd->add_option("--branch", sv_branch);
        cmd->add_option("--family-r", sv_family_r);
    }

    // reduce
    auto* rd = app.add_subcommand("reduce", "mod-m_E reduction report of a lattice");
    std::string rd_tau, rd_x1, rd_x2, rd_b, rd_w = "1";
    rd->add_option("--tau", rd_tau, "prin:i,j or super:m")->required();
    rd->add_option("--x1", rd_x1);
    rd->add_option("--x2", rd_x2);
    rd->add_option("--b", rd_b);
    rd->add_option("--w", rd_w);

    // classify
    auto* cl = app.add_subcommand("classify", "inertial forms of the trivial-endomorphism reductions");
    std::string cl_tau;
    cl->add_option("--tau", cl_tau, "prin:i,j or super:m")->required();

    // defring
    auto* df = app.add_subcommand("defring", "deformation-ring answer with the surjectivity record");
    std::string df_tau, df_rhobar;
    bool df_nosurj = false;
    df->add_option("--tau", df_tau)->required();
    df->add_option("--rhobar", df_rhobar, "red1|red2|niveau2|other")->required();
    df->add_flag("--no-surjectivity", df_nosurj, "skip the no-subalgebra-descent computation");

    // modform
    auto* mf = app.add_subcommand("modform", "weight-2 modular form reduction dispatch");
    long mf_j = 1;
    std::string mf_ap = "1", mf_chiN = "1", mf_slope;
    mf->add_option("--j", mf_j, "nebentypus exponent, 1..p-2")->required();
    mf->add_option("--ap", mf_ap, "a_p (integer or val=a/b,unit=c)");
    mf->add_option("--slope", mf_slope, "slope of a_p as a rational (consistency-checked)");
    mf->add_option("--chiN", mf_chiN, "chi_N(p) unit");

    // hom
    auto* hm = app.add_subcommand("hom", "morphism space between catalogue Breuil modules");
    std::string hm_datum = "F1", hm_src, hm_tgt;
    hm->add_option("--datum", hm_datum, "F1|F2|F2q");
    hm->add_option("--source", hm_src, "std:a,exp or min:a,exp (a = unit, theta-exponent)")->required();
    hm->add_option("--target", hm_tgt, "std:a,exp or min:a,exp")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto R = make_padic_ctx(p, prec, eE, fE);

        if (*se) {
            FamilyKind kind = se_family == "Y"      ? FamilyKind::Y
                              : se_family == "B"    ? FamilyKind::B
                              : se_family == "X1X2" ? FamilyKind::X1X2
                                                    : FamilyKind::scalar;
            OE w = make_oe(R, parse_valunit(se_w));
            FamilyCtxP F = kind == FamilyKind::scalar
                               ? make_scalar_family(R)
                               : make_family(kind, se_family_r, R, OE::from_int(R, p) * w);
            bool F2 = se_kind == "Vp" || se_kind == "Up" || se_kind == "W" || se_kind == "X";
            auto S = make_sctx(F2 ? FieldDatum::F2_over_Qp(p) : FieldDatum::F1_over_Qp(p), F, umax);
            RElem wr = RElem::from_OE(F, w);
            RElem xr = kind == FamilyKind::scalar
                           ? RElem::from_OE(F, make_oe(R, parse_valunit(se_kind == "W" || se_kind == "X" ? se_b : se_x)))
                           : RElem::variable(F, 0);
            SpecialElement el;
            if (se_kind == "V")
                el = solve_V(S, xr, wr, (int)se_j);
            else if (se_kind == "U")
                el = solve_U(S, xr, wr, (int)se_j);
            else if (se_kind == "Vp")
                el = solve_Vprime(S, xr, wr, (int)se_j);
            else if (se_kind == "Up")
                el = solve_Uprime(S, xr, wr, (int)se_j);
            else if (se_kind == "W")
                el = solve_W(S, xr, wr, (int)se_i, se_branch);
            else if (se_kind == "X")
                el = solve_X(S, xr, wr, se_branch);
            else
                throw CLI::ValidationError("--kind must be one of V|U|Vp|Up|W|X");
            emit(to_json(el));
        } else if (*wa) {
            FilteredModule D;
            if (wa_variant == "super") {
                OE a = make_oe(R, parse_valunit(wa_a));
                OE b = make_oe(R, parse_valunit(wa_b));
                OE x = wa_x.empty() ? OE::from_int(R, p) : make_oe(R, parse_valunit(wa_x));
                D = build_D_supercuspidal(R, wa_m, a, b, x);
            } else {
                OE x1 = make_oe(R, parse_valunit(wa_x1));
                OE x2 = wa_x2.empty() ? OE::from_int(R, p) * x1.inv_field() : make_oe(R, parse_valunit(wa_x2));
                D = build_D_principal(R, x1, x2, wa_i, wa_j, wa_variant == "prin2");
            }
            json j = to_json(check_weak_admissibility(D));
            j["galois_type"] = galois_type(D).to_string();
            emit(j);
        } else if (*bs || *vs) {
            SdmParams P;
            P.R = R;
            P.umax = umax;
            P.branch = sv_branch;
            P.family_r = sv_family_r;
            P.j = sv_j;
            P.m = sv_m;
            P.chr_exp = sv_exp;
            P.a = make_oe(R, parse_valunit(sv_a));
            P.w = make_oe(R, parse_valunit(sv_w));
            P.b = make_oe(R, parse_valunit(sv_b));
            P.x1 = make_oe(R, parse_valunit(sv_x1));
            if (!sv_x2.empty())
                P.x2 = make_oe(R, parse_valunit(sv_x2));
            else if (P.x1.valid() && !P.x1.is_zero() && P.w.valid())
                P.x2 = OE::from_int(R, p) * P.w * P.x1.inv_field();
            std::map<std::string, SdmVariant> names = {
                {"char_F1", SdmVariant::char_F1},        {"char_F2_niv1", SdmVariant::char_F2_niv1},
                {"char_F2_niv2", SdmVariant::char_F2_niv2}, {"prin_case1", SdmVariant::prin_case1},
                {"prin_case2", SdmVariant::prin_case2},  {"prin_case3", SdmVariant::prin_case3},
                {"super_general", SdmVariant::super_general}, {"super_i1", SdmVariant::super_i1},
                {"family_Y1", SdmVariant::family_Y1},    {"family_Y2", SdmVariant::family_Y2},
                {"family_X1X2", SdmVariant::family_X1X2}, {"family_B", SdmVariant::family_B},
                {"family_Bprime", SdmVariant::family_Bprime}, {"family_X", SdmVariant::family_X}};
            auto it = names.find(sv_variant);
            if (it == names.end()) throw CLI::ValidationError("unknown --variant");
            P.variant = it->second;
            auto M = build_sdm(P);
            json j = sdm_to_json(M);
            if (*vs) j["verification"] = to_json(verify_sdm(M));
            emit(j);
        } else if (*rd) {
            TameType tau = parse_tau(p, rd_tau);
            OE w = make_oe(R, parse_valunit(rd_w));
            if (tau.niveau == 1) {
                long j = ((tau.j - tau.i) % (p - 1) + (p - 1)) % (p - 1);
                OE x1 = make_oe(R, parse_valunit(rd_x1));
                OE x2 = rd_x2.empty() ? OE::from_int(R, p) * w * x1.inv_field() : make_oe(R, parse_valunit(rd_x2));
                auto rep = reduce_principal(R, x1, x2, w, j);
                json out = to_json(rep, *R->kE);
                out["twist"] = tau.i;
                emit(out);
            } else {
                OE b = make_oe(R, parse_valunit(rd_b));
                auto reps = reduce_supercuspidal(R, tau.m, b, w);
                json out = json::array();
                for (auto& rep : reps) out.push_back(to_json(rep, *R->kE));
                emit(out);
            }
        } else if (*cl) {
            TameType tau = parse_tau(p, cl_tau);
            auto forms = classify(R, tau);
            json out;
            out["schema_version"] = schema_version;
            out["tau"] = tau.to_string();
            json lst = json::array();
            for (auto& f : forms) lst.push_back(f.to_string(p));
            out["forms"] = lst;
            emit(out);
        } else if (*df) {
            TameType tau = parse_tau(p, df_tau);
            auto ans = deformation_ring_answer(R, tau, df_rhobar, !df_nosurj);
            emit(to_json(ans));
        } else if (*mf) {
            OE ap = make_oe(R, parse_valunit(mf_ap));
            if (!mf_slope.empty()) {
                auto slash = mf_slope.find('/');
                long sn = std::stol(mf_slope.substr(0, slash));
                long sd = slash == std::string::npos ? 1 : std::stol(mf_slope.substr(slash + 1));
                auto v = ap.valuation();
                if (!v || v->first * sd != sn * v->second)
                    throw inadmissible_parameters("--slope contradicts val(a_p)");
            }
            OE chiN = make_oe(R, parse_valunit(mf_chiN));
            auto rep = modular_form_reduction(R, mf_j, ap, chiN);
            emit(to_json(rep, *R->kE));
        } else if (*hm) {
            FieldDatum fd = hm_datum == "F1"   ? FieldDatum::F1_over_Qp(p)
                            : hm_datum == "F2" ? FieldDatum::F2_over_Qp(p)
                                               : FieldDatum::F2_over_Qp2(p);
            auto B = make_bctx(fd, make_actx(R->kE, 0), R);
            auto parse_mod = [&](const std::string& s) {
                auto colon = s.find(':');
                auto comma = s.find(',', colon);
                long a = std::stol(s.substr(colon + 1, comma - colon - 1));
                long ex = std::stol(s.substr(comma + 1));
                auto ai = R->kE->inv(R->kE->from_int(a));
                if (s.rfind("std:", 0) == 0) return standard_rank1(B, ai, ex);
                if (s.rfind("min:", 0) == 0) return minimal_rank1(B, ai, ex);
                throw CLI::ValidationError("module descriptor must be std:a,exp or min:a,exp");
            };
            auto M = parse_mod(hm_src);
            auto N = parse_mod(hm_tgt);
            auto homs = find_morphisms(M, N);
            json out;
            out["schema_version"] = schema_version;
            out["dim"] = homs.size();
            out["basis"] = morphisms_to_json(homs);
            emit(out);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cout << err.dump(2) << "\n";
        return exit_code_of(e);
    }
    return 0;
}

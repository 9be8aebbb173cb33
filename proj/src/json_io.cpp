#include "breuil/json_io.hpp"

namespace breuil {

json to_json(const OE& x) {
    json j;
    j["shift"] = x.shift();
    j["prec"] = x.prec();
    auto R = x.ctx();
    json coords = json::array();
    for (int i = 0; i < R->eE; ++i) {
        json pair = json::array();
        for (int t = 0; t < R->fE; ++t) pair.push_back(x.coord(i, t));
        coords.push_back(pair);
    }
    j["pi_coords"] = coords;
    return j;
}

json to_json(const RElem& x) {
    if (x.ctx()->kind == FamilyKind::scalar) return to_json(x.constant());
    json j;
    j["ring"] = x.ctx()->kind == FamilyKind::Y ? "OE[Y]" : x.ctx()->kind == FamilyKind::B ? "OE[B]" : "OE[[X1,X2]]/(X1X2-pw)";
    j["rcert"] = x.rcert();
    json coords = json::array();
    for (int i = 0; i < x.ncoords(); ++i) coords.push_back(to_json(x.coord(i)));
    j["coords"] = coords;
    return j;
}

json to_json(const SpecialElement& el) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind_name(el.spec.kind);
    json params;
    params["p"] = el.spec.fd.p;
    params["field"] = el.spec.fd.name();
    params["x_or_b"] = to_json(el.spec.x_or_b);
    params["w"] = to_json(el.spec.w);
    if (el.spec.kind == ElementKind::W)
        params["i"] = el.spec.i;
    else if (el.spec.kind != ElementKind::X)
        params["j"] = el.spec.j;
    params["branch"] = el.spec.branch;
    j["params"] = params;
    json coords = json::array();
    for (auto& [d, c] : el.series.coords()) {
        if (c.is_zero()) continue;
        json entry = json::array();
        entry.push_back(d);
        if (el.series.sctx()->fd.f == 1) {
            entry.push_back(c.z[0].to_string());
        } else {
            entry.push_back(c.z[0].to_string());
            entry.push_back(c.z[1].to_string());
        }
        coords.push_back(entry);
    }
    j["coords"] = coords;
    j["certified"] = {{"p_digits", el.certified_p_digits}, {"u_degree", el.certified_truncation}};
    return j;
}

json to_json(const CharacterDescriptor& chi, const SmallField& kE) {
    json j;
    j["niveau"] = chi.niveau;
    j["exponent"] = chi.exponent;
    j["unramified"] = kE.to_string(chi.lambda);
    j["base"] = chi.over_Qp2 ? "Qp2" : "Qp";
    return j;
}

json to_json(const ReductionReport& rep, const SmallField& kE) {
    json j;
    j["schema_version"] = schema_version;
    j["input"] = rep.input_desc;
    j["shape"] = shape_name(rep.shape);
    json chars = json::array();
    if (rep.shape == ReductionShape::niveau2_irreducible) {
        json c;
        c["niveau"] = 2;
        c["exponents"] = {rep.niveau2_exponents[0], rep.niveau2_exponents[1]};
        c["unramified"] = kE.to_string(rep.niveau2_unramified);
        chars.push_back(c);
    } else {
        chars.push_back(to_json(rep.sub_character, kE));
        chars.push_back(to_json(rep.quotient_character, kE));
    }
    j["characters"] = chars;
    j["extension_nonzero"] = rep.extension_nonzero;
    if (rep.peu_ramifie) {
        j["peu_ramifie"] = *rep.peu_ramifie;
        j["peu_source"] = rep.peu_source;
    }
    j["witnesses"] = rep.witnesses;
    j["certified"] = {{"p_digits", rep.certified_p_digits}, {"u_degree", rep.certified_u_degree}};
    j["field_extensions_used"] = rep.field_extensions_used;
    return j;
}

json to_json(const WadmReport& rep) {
    json j;
    j["schema_version"] = schema_version;
    j["admissible"] = rep.admissible;
    j["tH"] = {rep.tH_num, rep.tH_den};
    j["tN"] = {rep.tN_num, rep.tN_den};
    json cands = json::array();
    for (auto& c : rep.candidates) {
        json e;
        e["label"] = c.label;
        e["tH"] = {c.tH_num, c.tH_den};
        e["tN"] = {c.tN_num, c.tN_den};
        e["ok"] = c.ok;
        cands.push_back(e);
    }
    j["candidates"] = cands;
    return j;
}

json to_json(const SdmReport& rep) {
    json j;
    j["schema_version"] = schema_version;
    j["all_pass"] = rep.all_pass;
    json ax = json::array();
    for (auto& a : rep.axioms) ax.push_back({{"axiom", a.axiom}, {"pass", a.pass}, {"note", a.note}});
    j["axioms"] = ax;
    j["certified"] = {{"p_digits", rep.certified_p_digits}, {"u_degree", rep.certified_u_degree}};
    return j;
}

json to_json(const SurjectivityReport& rep) {
    json j;
    j["schema_version"] = schema_version;
    j["family"] = variant_name(rep.family);
    j["pass"] = rep.pass;
    j["subcharacter"] = rep.subcharacter;
    j["lines"] = rep.lines;
    j["hom_dim_total"] = rep.hom_dim_total;
    return j;
}

json to_json(const DefRingAnswer& ans) {
    json j;
    j["schema_version"] = schema_version;
    j["tau"] = ans.tau.to_string();
    j["rhobar_class"] = ans.rhobar_class;
    j["ring"] = ans.ring == DefRing::zero            ? "zero"
                : ans.ring == DefRing::power_series_1var ? "power_series_1var"
                                                         : "X1X2_quadric";
    j["mu_gal"] = ans.mu_gal;
    j["family"] = variant_name(ans.family);
    j["surjectivity"] = {{"pass", ans.surjectivity_pass}, {"note", ans.surjectivity_note}};
    return j;
}

json to_json(const BreuilModule& M) {
    json j;
    j["schema_version"] = schema_version;
    j["field"] = M.B->fd.name();
    j["rank"] = M.rank;
    j["label"] = M.label;
    auto mat = [&](const std::vector<std::vector<BElt>>& rows) {
        json out = json::array();
        for (auto& r : rows) {
            json rr = json::array();
            for (auto& x : r) rr.push_back(x.to_string());
            out.push_back(rr);
        }
        return out;
    };
    j["fil_generators"] = mat(M.gens);
    j["phi1_generators"] = mat(M.phi1_gens);
    j["phi1_ue_basis"] = mat(M.phibar);
    j["g0"] = mat(M.g0_mat);
    if (M.B->fd.has_gphi) j["gphi"] = mat(M.gphi_mat);
    return j;
}

json sdm_to_json(const SDModule& M) {
    json j;
    j["schema_version"] = schema_version;
    j["field"] = M.S->fd.name();
    j["variant"] = variant_name(M.params.variant);
    j["rank"] = M.rank;
    auto series = [&](const DPSeries& s) {
        json out = json::array();
        for (auto& [d, c] : s.coords()) {
            if (c.is_zero()) continue;
            json entry = json::array();
            entry.push_back(d);
            for (int mu = 0; mu < M.S->fd.f; ++mu) entry.push_back(c.z[mu].to_string());
            out.push_back(entry);
        }
        return out;
    };
    auto mat = [&](const std::vector<std::vector<DPSeries>>& rows) {
        json out = json::array();
        for (auto& r : rows) {
            json rr = json::array();
            for (auto& x : r) rr.push_back(series(x));
            out.push_back(rr);
        }
        return out;
    };
    j["fil_generators"] = mat(M.fil_gens);
    j["phi"] = mat(M.phi_mat);
    j["g0"] = mat(M.g0_mat);
    if (M.S->fd.has_gphi) j["gphi"] = mat(M.gphi_mat);
    j["umax"] = M.S->umax;
    return j;
}

json morphisms_to_json(const std::vector<std::vector<std::vector<BElt>>>& homs) {
    json j = json::array();
    for (auto& C : homs) {
        json m = json::array();
        for (auto& row : C) {
            json r = json::array();
            for (auto& x : row) r.push_back(x.to_string());
            m.push_back(r);
        }
        j.push_back(m);
    }
    return j;
}

} // namespace breuil

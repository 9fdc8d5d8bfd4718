//! Regenerate the golden fixtures (run from the crate root).

use std::fs;
use std::path::Path;

use planc_core::gadgets::{random_instance, GenParams};
use planc_core::sexp::{parse_document, print_domain, print_instance, Form};
use planc_core::{scheme_l7, scheme_l8, scheme_t20, scheme_t22, scheme_t6, FormalismTag, T22Variant};

const EX1: &str = r#"
(domain latexdoc
  (atoms tex aux dvi log ps bib bbl blg ind idx ilg dvi_ind_ok dvi_cite_ok)
  (operator bibtex (pre aux bib) (post (when () (bbl blg))))
  (operator makeindex (pre idx) (post (when () (ind ilg))))
  (operator latex (pre tex)
    (post
      (when () (aux idx dvi log))
      (when (bbl) (dvi_cite_ok))
      (when ((not bbl)) ((not dvi_cite_ok)))
      (when (ind) (dvi_ind_ok))
      (when ((not ind)) ((not dvi_ind_ok)))))
)
(instance (domain latexdoc)
  (init tex bib aux (not ind))
  (goal dvi dvi_cite_ok))
"#;

fn main() {
    let dir = Path::new("crates/planc-core/tests/golden");
    fs::create_dir_all(dir).unwrap();
    let forms = parse_document(EX1).unwrap();
    let dom = match &forms[0] {
        Form::Domain(d) => d.clone(),
        _ => unreachable!(),
    };
    let inst = match &forms[1] {
        Form::Instance(i) => i.resolve(&dom).unwrap(),
        _ => unreachable!(),
    };
    fs::write(dir.join("latexdoc_domain.pln"), print_domain(&dom)).unwrap();
    fs::write(dir.join("latexdoc_instance.pln"), print_instance(&inst)).unwrap();

    for (name, scheme) in [
        ("l7", scheme_l7()),
        ("l8", scheme_l8()),
        ("t20", scheme_t20()),
        ("t22b", scheme_t22(T22Variant::Boolean)),
        ("t22l", scheme_t22(T22Variant::Literal)),
    ] {
        let out = scheme.fxi(&dom).unwrap();
        fs::write(dir.join(format!("latexdoc_{name}.pln")), print_domain(&out)).unwrap();
    }
    // t6 needs an unconditional domain; record its output on the domain
    // restricted to the unconditional operators.
    let forms = parse_document(
        r#"
(domain latexdoc_flat
  (atoms tex aux dvi log ps bib bbl blg ind idx ilg dvi_ind_ok dvi_cite_ok)
  (operator bibtex (pre aux bib) (post (when () (bbl blg))))
  (operator makeindex (pre idx) (post (when () (ind ilg))))
)
"#,
    )
    .unwrap();
    let flat = match &forms[0] {
        Form::Domain(d) => d.clone(),
        _ => unreachable!(),
    };
    fs::write(
        dir.join("latexdoc_flat_t6.pln"),
        print_domain(&scheme_t6().fxi(&flat).unwrap()),
    )
    .unwrap();

    let gen = random_instance(&GenParams {
        tag: FormalismTag::S_LIC,
        atom_count: 4,
        operator_count: 3,
        max_effects: 2,
        max_condition_depth: 2,
        seed: 42,
    });
    fs::write(
        dir.join("gen_slic_seed42.pln"),
        format!("{}{}", print_domain(&gen.domain), print_instance(&gen)),
    )
    .unwrap();
    println!("golden fixtures written to {}", dir.display());
}

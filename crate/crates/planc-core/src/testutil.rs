//! Shared fixtures for the in-crate tests: the document-production domain
//! used as the running example, in its corrected and as-printed variants.

use crate::model::{DomainStructure, Instance};
use crate::sexp::{parse_document, Form};

pub const DOC_DOMAIN: &str = r#"
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
"#;

pub fn doc_domain() -> DomainStructure {
    let forms = parse_document(DOC_DOMAIN).unwrap();
    match forms.into_iter().next().unwrap() {
        Form::Domain(d) => d,
        _ => unreachable!(),
    }
}

fn instance_from(init_goal: &str) -> Instance {
    let text = format!("{DOC_DOMAIN}\n{init_goal}");
    let forms = parse_document(&text).unwrap();
    let mut dom = None;
    let mut inst = None;
    for form in forms {
        match form {
            Form::Domain(d) => dom = Some(d),
            Form::Instance(i) => inst = Some(i),
            _ => {}
        }
    }
    inst.unwrap().resolve(&dom.unwrap()).unwrap()
}

/// The solvable variant: the aux file is known to exist, so the two-step
/// production run goes through.
pub fn doc_instance() -> Instance {
    instance_from(
        "(instance (domain latexdoc) (init tex bib aux (not ind)) (goal dvi dvi_cite_ok))",
    )
}

/// The variant without aux: every first step is illegal, so nothing solves
/// it. Kept as a fixture of its own.
pub fn doc_instance_no_aux() -> Instance {
    instance_from(
        "(instance (domain latexdoc) (init tex bib (not ind)) (goal dvi dvi_cite_ok))",
    )
}

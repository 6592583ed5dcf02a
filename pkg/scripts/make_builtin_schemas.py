#!/usr/bin/env python3
"""Regenerate the shipped schema files under src/nocl/schemas/.

Vocabulary codes follow the OGB atom-featurizer conventions: element code i
maps to atomic number i+1; chirality and hybridization codes index the
RDKit enumerations OGB exposes. MUTAG element codes follow the dataset's
seven-atom label order (C, N, O, F, I, Cl, Br).
"""

from pathlib import Path

import yaml

ELEMENTS = [
    "hydrogen", "helium", "lithium", "beryllium", "boron", "carbon", "nitrogen",
    "oxygen", "fluorine", "neon", "sodium", "magnesium", "aluminum", "silicon",
    "phosphorus", "sulfur", "chlorine", "argon", "potassium", "calcium",
    "scandium", "titanium", "vanadium", "chromium", "manganese", "iron",
    "cobalt", "nickel", "copper", "zinc", "gallium", "germanium", "arsenic",
    "selenium", "bromine", "krypton", "rubidium", "strontium", "yttrium",
    "zirconium", "niobium", "molybdenum", "technetium", "ruthenium", "rhodium",
    "palladium", "silver", "cadmium", "indium", "tin", "antimony", "tellurium",
    "iodine", "xenon", "cesium", "barium", "lanthanum", "cerium",
    "praseodymium", "neodymium", "promethium", "samarium", "europium",
    "gadolinium", "terbium", "dysprosium", "holmium", "erbium", "thulium",
    "ytterbium", "lutetium", "hafnium", "tantalum", "tungsten", "rhenium",
    "osmium", "iridium", "platinum", "gold", "mercury", "thallium", "lead",
    "bismuth", "polonium", "astatine", "radon", "francium", "radium",
    "actinium", "thorium", "protactinium", "uranium", "neptunium", "plutonium",
    "americium", "curium", "berkelium", "californium", "einsteinium",
    "fermium", "mendelevium", "nobelium", "lawrencium", "rutherfordium",
    "dubnium", "seaborgium", "bohrium", "hassium", "meitnerium",
    "darmstadtium", "roentgenium", "copernicium", "nihonium", "flerovium",
    "moscovium", "livermorium", "tennessine", "oganesson",
]

CHIRALITY = [
    "chirality of type CHI_UNSPECIFIED",
    "chirality of type CHI_TETRAHEDRAL_CW",
    "chirality of type CHI_TETRAHEDRAL_CCW",
    "chirality of type CHI_OTHER",
    "chirality of another type",
]

HYBRIDIZATION = ["SP", "SP2", "SP3", "SP3D", "SP3D2", "another type"]

MUTAG_ELEMENTS = ["carbon", "nitrogen", "oxygen", "fluorine", "iodine", "chlorine", "bromine"]

MOLHIV = {
    "schema_name": "ogbg-molhiv",
    # fields in feature-vector dimension order
    "fields": [
        {"index": 0, "name": "atomic name", "kind": "vocab",
         "clause": "This atom is {}.",
         "vocab": {i: name for i, name in enumerate(ELEMENTS)}},
        {"index": 1, "name": "chirality type", "kind": "vocab",
         "clause": "It has a {}.",
         "vocab": {i: phrase for i, phrase in enumerate(CHIRALITY)}},
        {"index": 2, "name": "node degree", "kind": "integer",
         "clause": "Its degree is {}."},
        {"index": 3, "name": "formal charge number", "kind": "integer",
         "clause": "Its formal charge is {}."},
        {"index": 4, "name": "number of hydrogen atoms", "kind": "integer",
         "clause": "It connects {} hydrogen atoms."},
        {"index": 5, "name": "number of radical electrons", "kind": "integer",
         "clause": "The radical electrons of this atom is {}."},
        {"index": 6, "name": "hybridization type", "kind": "vocab",
         "clause": "Its hybridization type is {}.",
         "vocab": {i: phrase for i, phrase in enumerate(HYBRIDIZATION)}},
        {"index": 7, "name": "aromatic ring flag", "kind": "flag",
         "clause": "This atom is part of an aromatic ring.", "emit_when": True},
        {"index": 8, "name": "ring flag", "kind": "flag",
         "clause": "This atom is part of a ring.", "emit_when": True},
    ],
    # sentence order of the rendered description (differs from dimension order)
    "clause_order": [
        "atomic name",
        "chirality type",
        "formal charge number",
        "number of radical electrons",
        "hybridization type",
        "number of hydrogen atoms",
        "aromatic ring flag",
        "ring flag",
        "node degree",
    ],
}

MUTAG = {
    "schema_name": "mutag",
    "fields": [
        {"index": 0, "name": "atomic name", "kind": "vocab",
         "clause": "This atom is {}.",
         "vocab": {i: name for i, name in enumerate(MUTAG_ELEMENTS)}},
        {"index": 1, "name": "aromatic ring flag", "kind": "flag",
         "clause": "This atom is part of an aromatic ring.", "emit_when": True},
        {"index": 2, "name": "node degree", "kind": "integer",
         "clause": "Its degree is {}."},
    ],
}


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "src" / "nocl" / "schemas"
    out_dir.mkdir(parents=True, exist_ok=True)
    for data in (MOLHIV, MUTAG):
        path = out_dir / f"{data['schema_name']}.yaml"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# Editable feature schema; regenerate with scripts/make_builtin_schemas.py\n")
            yaml.safe_dump(data, fh, sort_keys=False, allow_unicode=True, width=100)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

use std::collections::BTreeSet;

use crate::group::Group;
use crate::scheme::{
    AttributeMap, CiphertextL1, CiphertextL2, DelegateeKey, MasterKey, PartialDecryption,
    ProxyReKey, PublicParams, TransformKey, TransformSecret, UserSecretKey,
};

use super::wire::{Reader, Writer};
use super::{FormatError, ObjectType, WireObject};

fn check_rows(rows: usize, matrix_rows: usize) -> Result<(), FormatError> {
    if rows != matrix_rows {
        return Err(FormatError::NonCanonical("row count differs from policy"));
    }
    Ok(())
}

fn nonzero<G: Group>(group: &G, s: G::Scalar) -> Result<G::Scalar, FormatError> {
    if group.is_zero(&s) {
        return Err(FormatError::NonCanonical("zero scalar"));
    }
    Ok(s)
}

impl<G: Group> WireObject<G> for PublicParams<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::PublicParams;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| {
            w.count(self.universe.len());
            for a in &self.universe {
                w.attr(a);
            }
        });
        w.field(3, |w| w.target(&self.e_gg_alpha));
        w.field(4, |w| w.source(&self.g_a));
        w.field(5, |w| {
            w.count(self.universe.len());
            for a in &self.universe {
                w.source(&self.h[a]);
            }
        });
    }

    fn read_fields(group: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        let universe = r.field(2, "universe", |r| {
            let n = r.count("universe")?;
            if n == 0 {
                return Err(FormatError::NonCanonical("empty universe"));
            }
            let mut seen = BTreeSet::new();
            (0..n)
                .map(|_| {
                    let a = r.attr()?;
                    if !seen.insert(a.clone()) {
                        return Err(FormatError::NonCanonical("duplicate attribute"));
                    }
                    Ok(a)
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        let e_gg_alpha = r.field(3, "e(g,g)^alpha", |r| r.target())?;
        let g_a = r.field(4, "g^a", |r| r.source())?;
        let h = r.field(5, "attribute elements", |r| {
            if r.count("attribute elements")? != universe.len() {
                return Err(FormatError::NonCanonical("attribute element count"));
            }
            universe
                .iter()
                .map(|a| Ok((a.clone(), r.source()?)))
                .collect::<Result<AttributeMap<_>, _>>()
        })?;
        Ok(PublicParams {
            group: group.clone(),
            universe,
            e_gg_alpha,
            g_a,
            h,
        })
    }
}

impl<G: Group> WireObject<G> for MasterKey<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::MasterKey;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.scalar(&self.alpha));
        w.field(3, |w| w.scalar(&self.a));
    }

    fn read_fields(group: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        let alpha = r.field(2, "alpha", |r| r.scalar())?;
        let a = r.field(3, "a", |r| r.scalar())?;
        Ok(MasterKey {
            alpha: nonzero(group, alpha)?,
            a: nonzero(group, a)?,
        })
    }
}

impl<G: Group> WireObject<G> for UserSecretKey<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::SecretKey;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.source(&self.k));
        w.field(3, |w| w.source(&self.l));
        w.field(4, |w| w.source_map(&self.k_x));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        Ok(UserSecretKey {
            k: r.field(2, "K", |r| r.source())?,
            l: r.field(3, "L", |r| r.source())?,
            k_x: r.field(4, "attribute keys", |r| r.source_map())?,
        })
    }
}

impl<G: Group> WireObject<G> for ProxyReKey<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::ProxyReKey;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.source(&self.k_p));
        w.field(3, |w| w.source(&self.l_p));
        w.field(4, |w| w.source_map(&self.k_px));
        w.field(5, |w| w.scalar(&self.rk_scalar));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        Ok(ProxyReKey {
            k_p: r.field(2, "K'", |r| r.source())?,
            l_p: r.field(3, "L'", |r| r.source())?,
            k_px: r.field(4, "attribute keys", |r| r.source_map())?,
            rk_scalar: r.field(5, "re-encryption scalar", |r| r.scalar())?,
        })
    }
}

impl<G: Group> WireObject<G> for DelegateeKey<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::DelegateeKey;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.source(&self.ak));
        w.field(3, |w| w.source(&self.l_dd));
        w.field(4, |w| w.source_map(&self.k_ddx));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        Ok(DelegateeKey {
            ak: r.field(2, "AK", |r| r.source())?,
            l_dd: r.field(3, "L''", |r| r.source())?,
            k_ddx: r.field(4, "attribute keys", |r| r.source_map())?,
        })
    }
}

impl<G: Group> WireObject<G> for CiphertextL1<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::CiphertextL1;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.matrix(&self.policy));
        w.field(3, |w| w.target(&self.c));
        w.field(4, |w| w.source(&self.c_prime));
        w.field(5, |w| {
            if let Some(c_hat) = &self.c_hat {
                w.source(c_hat);
            }
        });
        w.field(6, |w| w.rows(&self.rows));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        let policy = r.field(2, "policy", |r| r.matrix())?;
        let c = r.field(3, "C", |r| r.target())?;
        let c_prime = r.field(4, "C'", |r| r.source())?;
        let c_hat = r.field(5, "C-hat", |r| {
            if r.is_empty() {
                Ok(None)
            } else {
                r.source().map(Some)
            }
        })?;
        let rows = r.field(6, "ciphertext rows", |r| r.rows())?;
        check_rows(rows.len(), policy.row_count())?;
        Ok(CiphertextL1 {
            policy,
            c,
            c_prime,
            c_hat,
            rows,
        })
    }
}

impl<G: Group> WireObject<G> for CiphertextL2<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::CiphertextL2;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.matrix(&self.policy2));
        w.field(3, |w| w.target(&self.c));
        w.field(4, |w| w.target(&self.t0));
        w.field(5, |w| w.source(&self.p));
        w.field(6, |w| w.rows(&self.rows2));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        let policy2 = r.field(2, "policy", |r| r.matrix())?;
        let c = r.field(3, "C", |r| r.target())?;
        let t0 = r.field(4, "T0", |r| r.target())?;
        let p = r.field(5, "P", |r| r.source())?;
        let rows2 = r.field(6, "ciphertext rows", |r| r.rows())?;
        check_rows(rows2.len(), policy2.row_count())?;
        Ok(CiphertextL2 {
            policy2,
            c,
            t0,
            p,
            rows2,
        })
    }
}

impl<G: Group> WireObject<G> for TransformKey<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::TransformKey;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.source(&self.ak));
        w.field(3, |w| w.source(&self.l_tk));
        w.field(4, |w| w.source_map(&self.k_tkx));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        Ok(TransformKey {
            ak: r.field(2, "AK", |r| r.source())?,
            l_tk: r.field(3, "L", |r| r.source())?,
            k_tkx: r.field(4, "attribute keys", |r| r.source_map())?,
        })
    }
}

impl<G: Group> WireObject<G> for TransformSecret<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::TransformSecret;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.scalar(&self.z));
    }

    fn read_fields(group: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        let z = r.field(2, "z", |r| r.scalar())?;
        Ok(TransformSecret {
            z: nonzero(group, z)?,
        })
    }
}

impl<G: Group> WireObject<G> for PartialDecryption<G> {
    const OBJECT_TYPE: ObjectType = ObjectType::PartialDecryption;

    fn write_fields(&self, w: &mut Writer<'_, G>) {
        w.field(2, |w| w.target(&self.t0_full));
        w.field(3, |w| w.target(&self.t1));
    }

    fn read_fields(_: &G, r: &mut Reader<'_, '_, G>) -> Result<Self, FormatError> {
        Ok(PartialDecryption {
            t0_full: r.field(2, "T0", |r| r.target())?,
            t1: r.field(3, "T1", |r| r.target())?,
        })
    }
}
